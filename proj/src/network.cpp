// SPDX-License-Identifier: Apache-2.0
#include "awp/network.hpp"

#include <cmath>
#include <cstdio>

#include "awp/ast.hpp"
#include "awp/error.hpp"
#include "awp/nn.hpp"

namespace awp::model {
namespace {

bool two_encoders(const ModelParams& p) { return p.dims.variant == Variant::ast_attendgru; }

struct Encoded {
  EncoderOutput code;
  EncoderOutput ast;
};

Encoded run_encoders(const ModelParams& p, const Example& ex, EncoderTrace* code_trace,
                     EncoderTrace* ast_trace) {
  Encoded e;
  e.code = encode(ex.code, p.code_embed, p.code_gru, code_trace);
  if (two_encoders(p)) e.ast = encode(ex.ast, p.ast_embed, p.ast_gru, ast_trace);
  return e;
}

struct DecoderStep {
  int input = kStart;
  GruCache gru;
  Eigen::VectorXd state;
  Attention code_att;
  Attention ast_att;
  Eigen::VectorXd feature;
};

DecoderStep decoder_step(const ModelParams& p, const Encoded& enc, int input,
                         const Eigen::VectorXd& prev, bool keep_cache) {
  if (input < 0 || input >= p.summary_embed.rows()) {
    throw DataError("decoder input id " + std::to_string(input) + " out of range");
  }
  DecoderStep s;
  s.input = input;
  s.state = gru_step(p.decoder_gru, p.summary_embed.row(input).transpose(), prev,
                     keep_cache ? &s.gru : nullptr);
  s.code_att = attend(s.state, enc.code.states, enc.code.mask);
  const int h = p.dims.hidden;
  s.feature.resize(p.dims.feature());
  s.feature.segment(0, h) = s.code_att.context;
  if (two_encoders(p)) {
    s.ast_att = attend(s.state, enc.ast.states, enc.ast.mask);
    s.feature.segment(h, h) = s.ast_att.context;
  }
  s.feature.tail(h) = s.state;
  return s;
}

double log_sum_exp(const Eigen::VectorXd& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

template <class T>
std::vector<T> truncated(std::vector<T> v, std::size_t n) {
  if (v.size() > n) v.resize(n);
  return v;
}

}  // namespace

ModelInputs model_inputs(const corpus::FunctionRecord& record, const InputConfig& input) {
  ModelInputs in;
  const bool need_ast = input.variant == Variant::ast_attendgru;
  if (input.mode == Mode::challenge) {
    in.code = ast::challenge_strip_code(record).code_tokens;
    if (need_ast) in.ast = in.code;
  } else {
    in.code = record.code_tokens;
    if (need_ast) {
      if (!record.ast) throw DataError("record '" + record.id + "': ast-attendgru needs an AST");
      in.ast = ast::flatten_ast(*record.ast);
    }
  }
  in.code = truncated(std::move(in.code), input.max_code_len);
  in.ast = truncated(std::move(in.ast), input.max_ast_len);
  return in;
}

VocabSet build_vocabs(std::span<const corpus::FunctionRecord> train_records, Mode mode,
                      std::size_t max_size) {
  VocabSet v;
  if (mode == Mode::challenge) {
    v.code = build_vocab(train_records, VocabField::challenge, max_size);
    v.ast = v.code;
  } else {
    v.code = build_vocab(train_records, VocabField::code, max_size);
    v.ast = build_vocab(train_records, VocabField::ast, max_size);
  }
  v.summary = build_vocab(train_records, VocabField::summary, max_size);
  return v;
}

Example make_example(const Model& model, const corpus::FunctionRecord& record, std::size_t label) {
  const auto in = model_inputs(record, model.input);
  if (in.code.empty()) throw DataError("record '" + record.id + "': empty encoder input");
  Example ex;
  ex.code = model.vocabs.code.encode(in.code);
  if (model.input.variant == Variant::ast_attendgru) ex.ast = model.vocabs.ast.encode(in.ast);
  const auto summary = truncated(record.summary_tokens, model.input.max_summary_len);
  ex.summary = model.vocabs.summary.encode(summary);
  ex.summary.push_back(kEnd);
  ex.label = label;
  return ex;
}

double example_loss(const ModelParams& p, const Example& ex, ModelParams* grad,
                    std::size_t* units) {
  const bool two = two_encoders(p);
  const bool summary = p.dims.objective == Objective::summary;
  const int h = p.dims.hidden;

  EncoderTrace code_trace, ast_trace;
  const Encoded enc = run_encoders(p, ex, grad ? &code_trace : nullptr, grad ? &ast_trace : nullptr);

  // Teacher forcing: inputs START, y1, ..., targets y1, ..., END.
  std::vector<int> inputs{kStart};
  std::vector<int> targets;
  if (summary) {
    if (ex.summary.empty()) throw DataError("example without summary ids");
    targets = ex.summary;
    inputs.insert(inputs.end(), ex.summary.begin(), ex.summary.end() - 1);
  } else {
    if (ex.label >= static_cast<std::size_t>(p.dims.classes)) {
      throw DataError("class label " + std::to_string(ex.label) + " out of range");
    }
    targets.push_back(static_cast<int>(ex.label));
  }
  const Eigen::MatrixXd& w_out = summary ? p.out_w : p.cls_w;
  const Eigen::VectorXd& b_out = summary ? p.out_b : p.cls_b;

  std::vector<DecoderStep> steps;
  std::vector<Eigen::VectorXd> probs;
  steps.reserve(targets.size());
  double loss = 0.0;
  Eigen::VectorXd state = enc.code.final_state;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    steps.push_back(decoder_step(p, enc, inputs[t], state, grad != nullptr));
    state = steps.back().state;
    const Eigen::VectorXd logits = w_out * steps.back().feature + b_out;
    if (targets[t] < 0 || targets[t] >= logits.size()) throw DataError("target id out of range");
    loss += log_sum_exp(logits) - logits[targets[t]];
    if (grad) probs.push_back(softmax(logits));
  }
  if (units) *units = targets.size();
  if (!grad) return loss;

  Eigen::MatrixXd& g_w = summary ? grad->out_w : grad->cls_w;
  Eigen::VectorXd& g_b = summary ? grad->out_b : grad->cls_b;
  Eigen::MatrixXd d_code = Eigen::MatrixXd::Zero(enc.code.states.rows(), h);
  Eigen::MatrixXd d_ast;
  if (two) d_ast = Eigen::MatrixXd::Zero(enc.ast.states.rows(), h);
  Eigen::VectorXd d_next = Eigen::VectorXd::Zero(h);
  Eigen::VectorXd dx, d_prev;
  for (std::size_t t = targets.size(); t-- > 0;) {
    const DecoderStep& s = steps[t];
    Eigen::VectorXd dlogits = probs[t];
    dlogits[targets[t]] -= 1.0;
    g_w.noalias() += dlogits * s.feature.transpose();
    g_b += dlogits;
    const Eigen::VectorXd dfeat = w_out.transpose() * dlogits;
    Eigen::VectorXd ds = dfeat.tail(h) + d_next;
    attend_backward(s.state, enc.code.states, s.code_att, dfeat.segment(0, h), ds, d_code);
    if (two) attend_backward(s.state, enc.ast.states, s.ast_att, dfeat.segment(h, h), ds, d_ast);
    gru_step_backward(p.decoder_gru, s.gru, ds, grad->decoder_gru, dx, d_prev);
    grad->summary_embed.row(s.input) += dx.transpose();
    d_next = d_prev;
  }
  // The decoder starts from the code encoder's final state.
  encode_backward(p.code_embed, p.code_gru, code_trace, d_code, d_next, grad->code_embed,
                  grad->code_gru);
  if (two) {
    encode_backward(p.ast_embed, p.ast_gru, ast_trace, d_ast, Eigen::VectorXd::Zero(h),
                    grad->ast_embed, grad->ast_gru);
  }
  return loss;
}

double batch_loss(const ModelParams& params, std::span<const Example> batch, ModelParams* grad,
                  std::size_t* units_out) {
  if (batch.empty()) throw DataError("batch_loss: empty batch");
  ModelParams local;
  if (grad) local = ModelParams::zeros(params.dims);
  double total = 0.0;
  std::size_t units = 0;
  for (const auto& ex : batch) {
    std::size_t n = 0;
    total += example_loss(params, ex, grad ? &local : nullptr, &n);
    units += n;
  }
  if (units_out) *units_out = units;
  const double inv = 1.0 / static_cast<double>(units);
  if (grad) {
    local.scale(inv);
    *grad = std::move(local);
  }
  return total * inv;
}

Decoded decode(const Model& model, const corpus::FunctionRecord& record,
               std::optional<std::string_view> forced_first) {
  const ModelParams& p = model.params;
  if (p.dims.objective != Objective::summary) {
    throw UsageError("model was trained for action_word classification and cannot decode summaries");
  }
  const Example ex = make_example(model, record);
  const Encoded enc = run_encoders(p, ex, nullptr, nullptr);
  Decoded out;
  Eigen::VectorXd state = enc.code.final_state;
  int input = kStart;
  for (std::size_t step = 0; step < model.input.max_summary_len; ++step) {
    const DecoderStep s = decoder_step(p, enc, input, state, false);
    state = s.state;
    std::string token;
    if (step == 0 && forced_first) {
      token = std::string(*forced_first);
      input = model.vocabs.summary.id(token);
    } else {
      const Eigen::VectorXd logits = p.out_w * s.feature + p.out_b;
      input = argmax(logits);
      if (input == kEnd) break;
      token = model.vocabs.summary.token(input);
    }
    out.tokens.push_back(std::move(token));
    out.code_attention.push_back(s.code_att.weights);
    if (two_encoders(p)) out.ast_attention.push_back(s.ast_att.weights);
  }
  return out;
}

std::vector<std::string> predict_summary(const Model& model, const corpus::FunctionRecord& record) {
  return decode(model, record).tokens;
}

std::vector<std::string> force_action_word(const Model& model,
                                           const corpus::FunctionRecord& record,
                                           std::string_view gold_aw) {
  return decode(model, record, gold_aw).tokens;
}

Eigen::VectorXd class_distribution(const Model& model, const corpus::FunctionRecord& record) {
  const ModelParams& p = model.params;
  if (p.dims.objective != Objective::action_word) {
    throw UsageError("model has no action-word classification head");
  }
  const Example ex = make_example(model, record);
  const Encoded enc = run_encoders(p, ex, nullptr, nullptr);
  const DecoderStep s = decoder_step(p, enc, kStart, enc.code.final_state, false);
  return softmax(p.cls_w * s.feature + p.cls_b);
}

Classification classify_action_word(const Model& model, const corpus::FunctionRecord& record,
                                    const text::ClassMap& class_map,
                                    const text::VerbLexicon& lexicon) {
  Classification c;
  if (model.params.dims.objective == Objective::action_word) {
    if (static_cast<std::size_t>(model.params.dims.classes) != class_map.num_classes()) {
      throw DataError("classification head has " + std::to_string(model.params.dims.classes) +
                      " classes, class map has " + std::to_string(class_map.num_classes()));
    }
    c.distribution = class_distribution(model, record);
    c.label = static_cast<std::size_t>(argmax(c.distribution));
  } else {
    const auto summary = predict_summary(model, record);
    c.label = text::label_summary(summary, lexicon, class_map);
    c.distribution = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(class_map.num_classes()));
    c.distribution[static_cast<Eigen::Index>(c.label)] = 1.0;
  }
  return c;
}

std::string AttentionMatrix::to_tsv() const {
  std::string out;
  for (const auto& c : column_labels) {
    out += '\t';
    out += c;
  }
  out += '\n';
  char buf[32];
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += row_labels[r];
    for (Eigen::Index j = 0; j < rows[r].size(); ++j) {
      std::snprintf(buf, sizeof(buf), "\t%.9f", rows[r][j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

AttentionMatrix dump_attention(const Model& model, const corpus::FunctionRecord& record,
                               std::optional<std::string_view> forced_first) {
  const Decoded d = decode(model, record, forced_first);
  AttentionMatrix m;
  m.column_labels = model_inputs(record, model.input).code;
  m.row_labels = d.tokens;
  m.rows = d.code_attention;
  return m;
}

}  // namespace awp::model
