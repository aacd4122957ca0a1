// SPDX-License-Identifier: Apache-2.0
#include "awp/params.hpp"

#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::model {

std::string_view to_string(Variant v) {
  return v == Variant::attendgru ? "attendgru" : "ast-attendgru";
}
std::string_view to_string(Mode m) { return m == Mode::standard ? "standard" : "challenge"; }
std::string_view to_string(Objective o) {
  return o == Objective::summary ? "summary" : "action_word";
}

Variant parse_variant(std::string_view name) {
  if (name == "attendgru") return Variant::attendgru;
  if (name == "ast-attendgru" || name == "ast_attendgru") return Variant::ast_attendgru;
  throw UsageError("unknown variant '" + std::string(name) + "' (attendgru, ast-attendgru)");
}

Mode parse_mode(std::string_view name) {
  if (name == "standard") return Mode::standard;
  if (name == "challenge") return Mode::challenge;
  throw UsageError("unknown condition '" + std::string(name) + "' (standard, challenge)");
}

Objective parse_objective(std::string_view name) {
  if (name == "summary") return Objective::summary;
  if (name == "action_word" || name == "action-word") return Objective::action_word;
  throw UsageError("unknown objective '" + std::string(name) + "' (summary, action_word)");
}

GruWeights GruWeights::zeros(int input, int hidden) {
  GruWeights g;
  for (auto* w : {&g.w_z, &g.w_r, &g.w_h}) *w = Eigen::MatrixXd::Zero(hidden, input);
  for (auto* u : {&g.u_z, &g.u_r, &g.u_h}) *u = Eigen::MatrixXd::Zero(hidden, hidden);
  for (auto* b : {&g.b_z, &g.b_r, &g.b_h}) *b = Eigen::VectorXd::Zero(hidden);
  return g;
}

ModelParams ModelParams::zeros(const Dims& d) {
  if (d.embed < 1 || d.hidden < 1) throw UsageError("model dimensions must be at least 1");
  if (d.code_vocab < 1 || d.summary_vocab < 1) throw UsageError("model vocabularies must be nonempty");
  ModelParams p;
  p.dims = d;
  p.code_embed = Eigen::MatrixXd::Zero(d.code_vocab, d.embed);
  p.code_gru = GruWeights::zeros(d.embed, d.hidden);
  if (d.variant == Variant::ast_attendgru) {
    if (d.ast_vocab < 1) throw UsageError("ast-attendgru needs an AST vocabulary");
    p.ast_embed = Eigen::MatrixXd::Zero(d.ast_vocab, d.embed);
    p.ast_gru = GruWeights::zeros(d.embed, d.hidden);
  }
  p.summary_embed = Eigen::MatrixXd::Zero(d.summary_vocab, d.embed);
  p.decoder_gru = GruWeights::zeros(d.embed, d.hidden);
  if (d.objective == Objective::summary) {
    p.out_w = Eigen::MatrixXd::Zero(d.summary_vocab, d.feature());
    p.out_b = Eigen::VectorXd::Zero(d.summary_vocab);
  } else {
    if (d.classes < 2) throw UsageError("action_word objective needs at least 2 classes");
    p.cls_w = Eigen::MatrixXd::Zero(d.classes, d.feature());
    p.cls_b = Eigen::VectorXd::Zero(d.classes);
  }
  return p;
}

ModelParams ModelParams::initialize(const Dims& dims, std::uint64_t seed) {
  ModelParams p = zeros(dims);
  Rng rng(seed);
  p.visit([&rng](const std::string&, auto& array) {
    // Column-major fill order, matching the checkpoint layout.
    for (Eigen::Index i = 0; i < array.size(); ++i) array.data()[i] = rng.uniform(-0.08, 0.08);
  });
  return p;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  visit([&ok](const std::string&, const auto& a) { ok = ok && a.allFinite(); });
  return ok;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  visit([&n](const std::string&, const auto& a) { n += static_cast<std::size_t>(a.size()); });
  return n;
}

void ModelParams::add_scaled(const ModelParams& other, double factor) {
  std::vector<const double*> src;
  other.visit([&src](const std::string&, const auto& a) { src.push_back(a.data()); });
  std::size_t k = 0;
  visit([&](const std::string&, auto& a) {
    const double* s = src[k++];
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] += factor * s[i];
  });
}

double ModelParams::squared_norm() const {
  double sum = 0.0;
  visit([&sum](const std::string&, const auto& a) { sum += a.squaredNorm(); });
  return sum;
}

void ModelParams::scale(double factor) {
  visit([factor](const std::string&, auto& a) { a *= factor; });
}

}  // namespace awp::model
