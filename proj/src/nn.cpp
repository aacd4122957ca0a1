// SPDX-License-Identifier: Apache-2.0
#include "awp/nn.hpp"

#include <cmath>
#include <limits>

#include "awp/error.hpp"
#include "awp/vocab.hpp"

namespace awp::model {
namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

}  // namespace

Eigen::VectorXd gru_step(const GruWeights& w, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                         GruCache* cache) {
  if (x.size() != w.input_size() || h.size() != w.hidden_size()) {
    throw UsageError("gru_step: expected input " + std::to_string(w.input_size()) + " and state " +
                     std::to_string(w.hidden_size()) + ", got " + std::to_string(x.size()) +
                     " and " + std::to_string(h.size()));
  }
  const Eigen::VectorXd z = sigmoid(w.w_z * x + w.u_z * h + w.b_z);
  const Eigen::VectorXd r = sigmoid(w.w_r * x + w.u_r * h + w.b_r);
  const Eigen::VectorXd rh = r.cwiseProduct(h);
  const Eigen::VectorXd candidate = (w.w_h * x + w.u_h * rh + w.b_h).array().tanh().matrix();
  Eigen::VectorXd next = h + z.cwiseProduct(candidate - h);
  if (cache) {
    cache->x = x;
    cache->h_prev = h;
    cache->z = z;
    cache->r = r;
    cache->candidate = candidate;
  }
  return next;
}

void gru_step_backward(const GruWeights& w, const GruCache& c, const Eigen::VectorXd& dh,
                       GruWeights& g, Eigen::VectorXd& dx, Eigen::VectorXd& dh_prev) {
  const Eigen::VectorXd& z = c.z;
  const Eigen::VectorXd& r = c.r;
  const Eigen::VectorXd& h = c.h_prev;

  const Eigen::VectorXd dz = dh.cwiseProduct(c.candidate - h);
  const Eigen::VectorXd dcand = dh.cwiseProduct(z);
  dh_prev = dh.cwiseProduct(Eigen::VectorXd::Ones(z.size()) - z);

  const Eigen::VectorXd da_h =
      dcand.cwiseProduct((1.0 - c.candidate.array().square()).matrix());
  const Eigen::VectorXd rh = r.cwiseProduct(h);
  g.w_h.noalias() += da_h * c.x.transpose();
  g.u_h.noalias() += da_h * rh.transpose();
  g.b_h += da_h;
  const Eigen::VectorXd drh = w.u_h.transpose() * da_h;
  const Eigen::VectorXd dr = drh.cwiseProduct(h);
  dh_prev += drh.cwiseProduct(r);
  dx = w.w_h.transpose() * da_h;

  const Eigen::VectorXd da_z = dz.cwiseProduct((z.array() * (1.0 - z.array())).matrix());
  g.w_z.noalias() += da_z * c.x.transpose();
  g.u_z.noalias() += da_z * h.transpose();
  g.b_z += da_z;
  dx.noalias() += w.w_z.transpose() * da_z;
  dh_prev.noalias() += w.u_z.transpose() * da_z;

  const Eigen::VectorXd da_r = dr.cwiseProduct((r.array() * (1.0 - r.array())).matrix());
  g.w_r.noalias() += da_r * c.x.transpose();
  g.u_r.noalias() += da_r * h.transpose();
  g.b_r += da_r;
  dx.noalias() += w.w_r.transpose() * da_r;
  dh_prev.noalias() += w.u_r.transpose() * da_r;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

int argmax(const Eigen::VectorXd& values) {
  int best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

Attention attend(const Eigen::VectorXd& query, const Eigen::MatrixXd& keys, const Mask& mask) {
  const Eigen::Index n = keys.rows();
  if (static_cast<Eigen::Index>(mask.size()) != n) throw UsageError("attend: mask length mismatch");
  if (keys.cols() != query.size()) throw UsageError("attend: key and query widths differ");
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  Eigen::VectorXd scores(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    scores[t] = keys.row(t).dot(query);
    best = any ? std::max(best, scores[t]) : scores[t];
    any = true;
  }
  if (!any) throw DataError("attend: every source position is masked");
  Attention a;
  a.weights = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    a.weights[t] = std::exp(scores[t] - best);
    total += a.weights[t];
  }
  a.weights /= total;
  a.context = keys.transpose() * a.weights;
  return a;
}

void attend_backward(const Eigen::VectorXd& query, const Eigen::MatrixXd& keys,
                     const Attention& fwd, const Eigen::VectorXd& dcontext,
                     Eigen::VectorXd& dquery, Eigen::MatrixXd& dkeys) {
  const Eigen::VectorXd& w = fwd.weights;
  // context = keys^T w
  dkeys.noalias() += w * dcontext.transpose();
  const Eigen::VectorXd dw = keys * dcontext;
  const double mean = w.dot(dw);
  // Masked positions have w = 0, so their score gradient vanishes.
  const Eigen::VectorXd dscore = w.cwiseProduct((dw.array() - mean).matrix());
  dquery.noalias() += keys.transpose() * dscore;
  dkeys.noalias() += dscore * query.transpose();
}

EncoderOutput encode(std::span<const int> ids, const Eigen::MatrixXd& embed, const GruWeights& gru,
                     EncoderTrace* trace) {
  const int hidden = gru.hidden_size();
  EncoderOutput out;
  out.states = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(ids.size()), hidden);
  out.mask.assign(ids.size(), 0);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(hidden);
  if (trace) {
    trace->ids.assign(ids.begin(), ids.end());
    trace->steps.assign(ids.size(), GruCache{});
  }
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int id = ids[t];
    if (id < 0 || id >= embed.rows()) {
      throw DataError("encode: token id " + std::to_string(id) + " outside vocabulary of size " +
                      std::to_string(embed.rows()));
    }
    if (id != kPad) {
      h = gru_step(gru, embed.row(id).transpose(), h, trace ? &trace->steps[t] : nullptr);
      out.mask[t] = 1;
    }
    out.states.row(static_cast<Eigen::Index>(t)) = h.transpose();
  }
  out.final_state = h;
  return out;
}

void encode_backward(const Eigen::MatrixXd& embed, const GruWeights& gru, const EncoderTrace& trace,
                     const Eigen::MatrixXd& dstates, const Eigen::VectorXd& dfinal,
                     Eigen::MatrixXd& dembed, GruWeights& dgru) {
  (void)embed;
  Eigen::VectorXd dh = dfinal;
  Eigen::VectorXd dx, dh_prev;
  for (std::size_t i = trace.ids.size(); i-- > 0;) {
    dh += dstates.row(static_cast<Eigen::Index>(i)).transpose();
    const int id = trace.ids[i];
    if (id == kPad) continue;  // state passes through unchanged
    gru_step_backward(gru, trace.steps[i], dh, dgru, dx, dh_prev);
    dembed.row(id) += dx.transpose();
    dh = dh_prev;
  }
}

}  // namespace awp::model
