// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "awp/textproc.hpp"

namespace awp::metrics {

/// Rows are gold classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> classes);

  std::size_t size() const { return classes_.size(); }
  const std::vector<std::string>& classes() const { return classes_; }

  std::size_t at(std::size_t gold, std::size_t pred) const { return counts_[gold * size() + pred]; }
  void add(std::size_t gold, std::size_t pred);

  std::size_t total() const;
  std::size_t row_sum(std::size_t gold) const;
  std::size_t col_sum(std::size_t pred) const;

  std::string to_tsv() const;

 private:
  std::vector<std::string> classes_;
  std::vector<std::size_t> counts_;
};

/// Tallies gold/predicted class pairs. Throws DataError on length mismatch,
/// empty input or an out-of-range class id.
ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> pred,
                          const text::ClassMap& class_map);

enum class Averaging { macro, weighted };

struct ClassScores {
  std::string name;
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvaluationReport {
  std::vector<ClassScores> per_class;
  Averaging averaging = Averaging::macro;
  bool includes_other = true;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Per-class and averaged precision/recall/F1. Zero denominators give 0.
/// Macro averages every included class equally; weighted uses gold counts.
/// With include_other = false the last ("other") class is left out of the
/// average.
EvaluationReport precision_recall_f(const ConfusionMatrix& matrix, Averaging averaging,
                                    bool include_other = true);

double f1_score(double precision, double recall);

struct WordRecall {
  std::string stem;
  std::size_t gold_count = 0;
  double recall = 0.0;
};

/// Per-class recall sorted by gold count (descending, then class order).
std::vector<WordRecall> per_word_recall(const ConfusionMatrix& matrix);

using Tokens = std::vector<std::string>;

/// Called with (order, n-gram) for every candidate n-gram that is counted.
using NgramObserver = std::function<void(std::size_t, std::span<const std::string>)>;

struct BleuStats {
  std::vector<std::size_t> matches;  // clipped, per order 1..max_n
  std::vector<std::size_t> totals;
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

BleuStats bleu_stats(std::span<const Tokens> candidates, std::span<const Tokens> references,
                     std::size_t max_n = 4, const NgramObserver& observer = {});

/// Corpus BLEU with pooled clipped n-gram counts, add-one smoothing on
/// orders >= 2 and brevity penalty exp(1 - r/c) when c < r. An order with
/// no candidate n-grams at all scores (0 + 1) / (0 + 1), so bleu(x, x) = 1
/// even for corpora of very short sequences.
double bleu(std::span<const Tokens> candidates, std::span<const Tokens> references,
            std::size_t max_n = 4);
double bleu_from_stats(const BleuStats& stats);

inline constexpr std::string_view kBleuVariant = "corpus-bleu4/add1-smoothing-n>=2/v1";

struct PartitionedBleuReport {
  std::optional<double> bleu_default;
  std::optional<double> bleu_aw_correct;
  std::optional<double> bleu_aw_incorrect;
  std::optional<double> bleu_aw_forced;
  std::size_t evaluated = 0;
  std::size_t aw_correct = 0;
  std::size_t aw_incorrect = 0;
  std::size_t excluded = 0;  // references without an action word
};

/// Summary tokens with the action word removed, and whether one was found.
struct AwSplit {
  std::optional<text::ActionWordLabel> action_word;
  Tokens rest;
};
AwSplit remove_action_word(std::span<const std::string> summary, const text::VerbLexicon& lexicon);

/// BLEU of summaries with their action word removed, over all records and
/// split by whether the predicted action-word stem matches the reference.
/// forced[i] must be set for every action-word-incorrect record; its first
/// token is the fed action word and is removed before scoring.
PartitionedBleuReport aw_partitioned_bleu(std::span<const Tokens> references,
                                          std::span<const Tokens> predictions,
                                          std::span<const std::optional<Tokens>> forced,
                                          const text::VerbLexicon& lexicon,
                                          const NgramObserver& observer = {});

/// True when stem(predicted action word) equals stem(reference action word).
bool action_word_correct(std::span<const std::string> reference,
                         std::span<const std::string> prediction,
                         const text::VerbLexicon& lexicon);

}  // namespace awp::metrics
