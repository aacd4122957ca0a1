// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "awp/params.hpp"
#include "awp/record.hpp"
#include "awp/textproc.hpp"
#include "awp/vocab.hpp"

namespace awp::model {

struct InputConfig {
  Variant variant = Variant::ast_attendgru;
  Mode mode = Mode::standard;
  std::size_t max_code_len = 100;
  std::size_t max_ast_len = 100;
  std::size_t max_summary_len = 13;

  bool operator==(const InputConfig&) const = default;
};

/// The token streams an encoder pair actually consumes.
///
/// standard:  code = code_tokens, ast = flat AST.
/// challenge: both = flat anonymized AST; no identifier or literal text.
struct ModelInputs {
  std::vector<std::string> code;
  std::vector<std::string> ast;
};

ModelInputs model_inputs(const corpus::FunctionRecord& record, const InputConfig& input);

struct VocabSet {
  Vocabulary code;
  Vocabulary ast;
  Vocabulary summary;
};

/// Vocabularies for a condition: challenge mode builds code and AST tables
/// from the anonymized stream.
VocabSet build_vocabs(std::span<const corpus::FunctionRecord> train_records, Mode mode,
                      std::size_t max_size);

/// Parameters plus everything needed to turn records into ids.
struct Model {
  ModelParams params;
  VocabSet vocabs;
  InputConfig input;
};

/// A record encoded to ids. Summary ids end with END.
struct Example {
  std::vector<int> code;
  std::vector<int> ast;
  std::vector<int> summary;
  std::size_t label = 0;
};

Example make_example(const Model& model, const corpus::FunctionRecord& record,
                     std::size_t label = 0);

/// Loss of one example; when grad is non-null its gradient is added to it.
/// Summary objective: summed token cross-entropy (teacher forcing).
/// action_word objective: class cross-entropy of the first decoder step.
/// `units` receives the number of predictions scored.
double example_loss(const ModelParams& params, const Example& example, ModelParams* grad,
                    std::size_t* units = nullptr);

/// Mean loss per scored unit over a batch, with the matching gradient.
double batch_loss(const ModelParams& params, std::span<const Example> batch,
                  ModelParams* grad = nullptr, std::size_t* units = nullptr);

struct Decoded {
  std::vector<std::string> tokens;
  /// Row t = attention over source positions when emitting token t.
  std::vector<Eigen::VectorXd> code_attention;
  std::vector<Eigen::VectorXd> ast_attention;
};

/// Greedy decoding from START. `forced_first`, when set, replaces the first
/// emitted token and is consumed as the next decoder input.
Decoded decode(const Model& model, const corpus::FunctionRecord& record,
               std::optional<std::string_view> forced_first = std::nullopt);

std::vector<std::string> predict_summary(const Model& model, const corpus::FunctionRecord& record);

/// Decodes with the gold action word fed after START. Out-of-vocabulary
/// words are fed as UNK; the returned summary still starts with `gold_aw`.
std::vector<std::string> force_action_word(const Model& model,
                                           const corpus::FunctionRecord& record,
                                           std::string_view gold_aw);

struct Classification {
  std::size_t label = 0;
  Eigen::VectorXd distribution;  // k + 1 entries
};

/// action_word objective: softmax head, argmax with lowest-index ties.
/// summary objective: action word extracted from the greedy summary,
/// stemmed and mapped; the distribution is one-hot on that class.
Classification classify_action_word(const Model& model, const corpus::FunctionRecord& record,
                                    const text::ClassMap& class_map,
                                    const text::VerbLexicon& lexicon);

/// Softmax of the action_word head for one record.
Eigen::VectorXd class_distribution(const Model& model, const corpus::FunctionRecord& record);

struct AttentionMatrix {
  std::vector<std::string> row_labels;     // emitted summary tokens
  std::vector<std::string> column_labels;  // source tokens
  std::vector<Eigen::VectorXd> rows;

  /// Tab-separated; header row of source tokens, one row per summary token.
  std::string to_tsv() const;
};

/// Attention of the first (code) encoder during greedy or forced decoding.
AttentionMatrix dump_attention(const Model& model, const corpus::FunctionRecord& record,
                               std::optional<std::string_view> forced_first = std::nullopt);

}  // namespace awp::model
