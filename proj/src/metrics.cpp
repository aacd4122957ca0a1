// SPDX-License-Identifier: Apache-2.0
#include "awp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "awp/error.hpp"

namespace awp::metrics {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)), counts_(classes_.size() * classes_.size(), 0) {
  if (classes_.empty()) throw UsageError("confusion matrix needs at least one class");
}

void ConfusionMatrix::add(std::size_t gold, std::size_t pred) {
  if (gold >= size() || pred >= size()) throw DataError("confusion: class id out of range");
  ++counts_[gold * size() + pred];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < size(); ++p) s += at(gold, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::size_t s = 0;
  for (std::size_t g = 0; g < size(); ++g) s += at(g, pred);
  return s;
}

std::string ConfusionMatrix::to_tsv() const {
  std::string out = "gold\\pred";
  for (const auto& c : classes_) out += "\t" + c;
  out += "\n";
  for (std::size_t g = 0; g < size(); ++g) {
    out += classes_[g];
    for (std::size_t p = 0; p < size(); ++p) out += "\t" + std::to_string(at(g, p));
    out += "\n";
  }
  return out;
}

ConfusionMatrix confusion(std::span<const std::size_t> gold, std::span<const std::size_t> pred,
                          const text::ClassMap& class_map) {
  if (gold.size() != pred.size()) throw DataError("confusion: gold and predicted lengths differ");
  if (gold.empty()) throw DataError("confusion: no records");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < class_map.num_classes(); ++i) names.push_back(class_map.name(i));
  ConfusionMatrix m(std::move(names));
  for (std::size_t i = 0; i < gold.size(); ++i) m.add(gold[i], pred[i]);
  return m;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

EvaluationReport precision_recall_f(const ConfusionMatrix& matrix, Averaging averaging,
                                    bool include_other) {
  EvaluationReport report;
  report.averaging = averaging;
  report.includes_other = include_other;
  for (std::size_t c = 0; c < matrix.size(); ++c) {
    ClassScores s;
    s.name = matrix.classes()[c];
    s.support = matrix.row_sum(c);
    const auto col = matrix.col_sum(c);
    const auto diag = static_cast<double>(matrix.at(c, c));
    s.precision = col ? diag / static_cast<double>(col) : 0.0;
    s.recall = s.support ? diag / static_cast<double>(s.support) : 0.0;
    s.f1 = f1_score(s.precision, s.recall);
    report.per_class.push_back(std::move(s));
  }

  const std::size_t used = include_other ? matrix.size() : matrix.size() - 1;
  double weight_sum = 0.0;
  for (std::size_t c = 0; c < used; ++c) {
    const auto& s = report.per_class[c];
    const double w = averaging == Averaging::macro ? 1.0 : static_cast<double>(s.support);
    report.precision += w * s.precision;
    report.recall += w * s.recall;
    report.f1 += w * s.f1;
    weight_sum += w;
  }
  if (weight_sum > 0.0) {
    report.precision /= weight_sum;
    report.recall /= weight_sum;
    report.f1 /= weight_sum;
  }
  return report;
}

std::vector<WordRecall> per_word_recall(const ConfusionMatrix& matrix) {
  std::vector<WordRecall> out;
  for (std::size_t c = 0; c < matrix.size(); ++c) {
    WordRecall w;
    w.stem = matrix.classes()[c];
    w.gold_count = matrix.row_sum(c);
    w.recall = w.gold_count ? static_cast<double>(matrix.at(c, c)) / static_cast<double>(w.gold_count) : 0.0;
    out.push_back(std::move(w));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const WordRecall& a, const WordRecall& b) { return a.gold_count > b.gold_count; });
  return out;
}

BleuStats bleu_stats(std::span<const Tokens> candidates, std::span<const Tokens> references,
                     std::size_t max_n, const NgramObserver& observer) {
  if (candidates.size() != references.size()) throw DataError("bleu: candidate and reference counts differ");
  if (candidates.empty()) throw DataError("bleu: empty candidate corpus");
  if (max_n < 1) throw UsageError("bleu: max_n must be at least 1");

  BleuStats stats;
  stats.matches.assign(max_n, 0);
  stats.totals.assign(max_n, 0);
  using Gram = std::vector<std::string>;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const Tokens& cand = candidates[i];
    const Tokens& ref = references[i];
    stats.candidate_length += cand.size();
    stats.reference_length += ref.size();
    for (std::size_t n = 1; n <= max_n; ++n) {
      if (cand.size() < n) continue;
      std::map<Gram, std::size_t> ref_counts;
      for (std::size_t j = 0; j + n <= ref.size(); ++j) ++ref_counts[Gram(ref.begin() + j, ref.begin() + j + n)];
      std::map<Gram, std::size_t> cand_counts;
      for (std::size_t j = 0; j + n <= cand.size(); ++j) {
        if (observer) observer(n, std::span<const std::string>(cand.data() + j, n));
        ++cand_counts[Gram(cand.begin() + j, cand.begin() + j + n)];
      }
      for (const auto& [gram, count] : cand_counts) {
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) stats.matches[n - 1] += std::min(count, it->second);
      }
      stats.totals[n - 1] += cand.size() - n + 1;
    }
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  const double c = static_cast<double>(stats.candidate_length);
  const double r = static_cast<double>(stats.reference_length);
  if (c == 0.0 || stats.matches.empty() || stats.matches[0] == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < stats.matches.size(); ++n) {
    double m = static_cast<double>(stats.matches[n]);
    double t = static_cast<double>(stats.totals[n]);
    if (n > 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
  }
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / static_cast<double>(stats.matches.size()));
}

double bleu(std::span<const Tokens> candidates, std::span<const Tokens> references, std::size_t max_n) {
  return bleu_from_stats(bleu_stats(candidates, references, max_n));
}

AwSplit remove_action_word(std::span<const std::string> summary, const text::VerbLexicon& lexicon) {
  AwSplit out;
  out.action_word = text::extract_action_word(summary, lexicon);
  const std::size_t skip = out.action_word ? static_cast<std::size_t>(out.action_word->position - 1)
                                           : summary.size();
  for (std::size_t i = 0; i < summary.size(); ++i) {
    if (i != skip) out.rest.push_back(summary[i]);
  }
  return out;
}

bool action_word_correct(std::span<const std::string> reference, std::span<const std::string> prediction,
                         const text::VerbLexicon& lexicon) {
  const auto ref = text::extract_action_word(reference, lexicon);
  const auto pred = text::extract_action_word(prediction, lexicon);
  return ref && pred && ref->stem == pred->stem;
}

PartitionedBleuReport aw_partitioned_bleu(std::span<const Tokens> references,
                                          std::span<const Tokens> predictions,
                                          std::span<const std::optional<Tokens>> forced,
                                          const text::VerbLexicon& lexicon,
                                          const NgramObserver& observer) {
  if (references.size() != predictions.size()) {
    throw DataError("aw_partitioned_bleu: predictions do not cover every record");
  }
  if (forced.size() != references.size()) {
    throw DataError("aw_partitioned_bleu: forced predictions must be indexed like the records");
  }
  std::vector<Tokens> all_ref, all_pred, ok_ref, ok_pred, bad_ref, bad_pred, forced_pred;
  PartitionedBleuReport report;
  for (std::size_t i = 0; i < references.size(); ++i) {
    AwSplit ref = remove_action_word(references[i], lexicon);
    if (!ref.action_word) {
      ++report.excluded;
      continue;
    }
    AwSplit pred = remove_action_word(predictions[i], lexicon);
    const bool correct = pred.action_word && pred.action_word->stem == ref.action_word->stem;
    ++report.evaluated;
    all_ref.push_back(ref.rest);
    all_pred.push_back(pred.rest);
    if (correct) {
      ++report.aw_correct;
      ok_ref.push_back(ref.rest);
      ok_pred.push_back(std::move(pred.rest));
    } else {
      ++report.aw_incorrect;
      if (!forced[i]) {
        throw DataError("aw_partitioned_bleu: missing forced prediction for record " + std::to_string(i));
      }
      const Tokens& f = *forced[i];
      forced_pred.emplace_back(f.empty() ? f.begin() : f.begin() + 1, f.end());
      bad_ref.push_back(std::move(ref.rest));
      bad_pred.push_back(std::move(pred.rest));
    }
  }
  const auto score = [&](const std::vector<Tokens>& cand, const std::vector<Tokens>& ref) -> std::optional<double> {
    if (cand.empty()) return std::nullopt;
    return bleu_from_stats(bleu_stats(cand, ref, 4, observer));
  };
  report.bleu_default = score(all_pred, all_ref);
  report.bleu_aw_correct = score(ok_pred, ok_ref);
  report.bleu_aw_incorrect = score(bad_pred, bad_ref);
  report.bleu_aw_forced = score(forced_pred, bad_ref);
  return report;
}

}  // namespace awp::metrics
