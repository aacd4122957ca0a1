// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace awp::model {

enum class Variant { attendgru, ast_attendgru };
enum class Mode { standard, challenge };
enum class Objective { summary, action_word };

std::string_view to_string(Variant v);
std::string_view to_string(Mode m);
std::string_view to_string(Objective o);
Variant parse_variant(std::string_view name);
Mode parse_mode(std::string_view name);
Objective parse_objective(std::string_view name);

struct Dims {
  int embed = 32;
  int hidden = 64;
  int code_vocab = 0;
  int ast_vocab = 0;
  int summary_vocab = 0;
  int classes = 0;  // k + 1; used by the action_word head
  Variant variant = Variant::ast_attendgru;
  Objective objective = Objective::summary;

  int encoders() const { return variant == Variant::ast_attendgru ? 2 : 1; }
  /// Width of the decoder feature [contexts..., state].
  int feature() const { return hidden * (encoders() + 1); }

  bool operator==(const Dims&) const = default;
};

/// z = sigmoid(w_z x + u_z h + b_z); r = sigmoid(w_r x + u_r h + b_r);
/// candidate = tanh(w_h x + u_h (r .* h) + b_h); h' = (1 - z) .* h + z .* candidate.
struct GruWeights {
  Eigen::MatrixXd w_z, u_z, w_r, u_r, w_h, u_h;
  Eigen::VectorXd b_z, b_r, b_h;

  static GruWeights zeros(int input, int hidden);

  int input_size() const { return static_cast<int>(w_z.cols()); }
  int hidden_size() const { return static_cast<int>(w_z.rows()); }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w_z", w_z);
    f(prefix + ".u_z", u_z);
    f(prefix + ".b_z", b_z);
    f(prefix + ".w_r", w_r);
    f(prefix + ".u_r", u_r);
    f(prefix + ".b_r", b_r);
    f(prefix + ".w_h", w_h);
    f(prefix + ".u_h", u_h);
    f(prefix + ".b_h", b_h);
  }
};

/// All trainable arrays. Embedding tables hold one row per token.
struct ModelParams {
  Dims dims;
  Eigen::MatrixXd code_embed;
  GruWeights code_gru;
  Eigen::MatrixXd ast_embed;  // ast_attendgru only
  GruWeights ast_gru;
  Eigen::MatrixXd summary_embed;
  GruWeights decoder_gru;
  Eigen::MatrixXd out_w;  // summary objective: vocab x feature
  Eigen::VectorXd out_b;
  Eigen::MatrixXd cls_w;  // action_word objective: classes x feature
  Eigen::VectorXd cls_b;

  static ModelParams zeros(const Dims& dims);

  /// uniform(-0.08, 0.08), drawn in visit() order from one seeded stream.
  static ModelParams initialize(const Dims& dims, std::uint64_t seed);

  /// Calls f(name, array) for every array the variant/objective uses, in a
  /// fixed order. Arrays are Eigen::MatrixXd or Eigen::VectorXd.
  template <class F>
  void visit(F&& f) {
    f(std::string("code.embed"), code_embed);
    code_gru.visit("code.gru", f);
    if (dims.variant == Variant::ast_attendgru) {
      f(std::string("ast.embed"), ast_embed);
      ast_gru.visit("ast.gru", f);
    }
    f(std::string("decoder.embed"), summary_embed);
    decoder_gru.visit("decoder.gru", f);
    if (dims.objective == Objective::summary) {
      f(std::string("out.w"), out_w);
      f(std::string("out.b"), out_b);
    } else {
      f(std::string("cls.w"), cls_w);
      f(std::string("cls.b"), cls_b);
    }
  }

  template <class F>
  void visit(F&& f) const {
    const_cast<ModelParams*>(this)->visit([&f](const std::string& name, const auto& array) {
      f(name, array);
    });
  }

  bool all_finite() const;
  std::size_t parameter_count() const;

  /// this += scale * other, array by array.
  void add_scaled(const ModelParams& other, double scale);
  double squared_norm() const;
  void scale(double factor);
};

}  // namespace awp::model
