// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "awp/record.hpp"
#include "awp/textproc.hpp"

namespace awp::corpus {

/// Reads a JSON-lines corpus. Errors carry the 1-based line number.
std::vector<FunctionRecord> load_corpus(const std::filesystem::path& path);
std::vector<FunctionRecord> parse_corpus(std::string_view text);

std::string to_jsonl(std::span<const FunctionRecord> records);
void save_corpus(const std::filesystem::path& path, std::span<const FunctionRecord> records);

struct QualityLimits {
  std::size_t min_summary_len = 3;
  std::size_t max_summary_len = 13;
  std::size_t max_code_len = 100;
};

/// Keeps records with min <= |summary| <= max and 1 <= |code| <= max_code_len.
std::vector<FunctionRecord> filter_quality(std::span<const FunctionRecord> records,
                                           const QualityLimits& limits);

inline const std::vector<std::string>& default_generated_markers() {
  static const std::vector<std::string> markers{"generated by", "do not edit"};
  return markers;
}

/// Drops records whose raw_code contains any marker (case-insensitive).
/// Records without raw_code are kept.
std::vector<FunctionRecord> filter_generated(std::span<const FunctionRecord> records,
                                             std::span<const std::string> markers);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  /// Header line plus three id sections.
  std::string to_text() const;
  static DatasetSplit from_text(std::string_view text);
};

/// Keyed hash ordering projects in split_by_project: FNV-1a 64 over the
/// seed's 8 little-endian bytes, then the project id bytes.
std::uint64_t project_key(std::uint64_t seed, std::string_view project_id);

/// Project-disjoint three-way split.
///
/// Projects are visited in ascending project_key order. Each goes to the
/// split it fits most tightly (smallest remaining deficit that still
/// holds the whole project); when it fits nowhere, to the split furthest
/// below its target. Once the projects left are no more than the splits
/// still empty, each remaining project opens an empty split.
DatasetSplit split_by_project(std::span<const FunctionRecord> records, const SplitRatios& ratios,
                              std::uint64_t seed);

/// Records of `records` whose ids appear in `ids`, in corpus order.
std::vector<FunctionRecord> select(std::span<const FunctionRecord> records,
                                   std::span<const std::string> ids);

/// n records picked by a seeded shuffle, kept in their original order.
std::vector<FunctionRecord> subsample(std::span<const FunctionRecord> records, std::size_t n,
                                      std::uint64_t seed);

struct ActionWordStats {
  std::size_t total = 0;
  std::size_t with_action_word = 0;
  /// Counts for positions 1, 2, 3 and "none".
  std::array<std::size_t, 4> position_counts{};
  /// Records whose action word is the only lexicon verb in the summary.
  std::size_t only_verb = 0;
  std::vector<std::pair<std::string, std::size_t>> top_stems;

  double action_word_fraction() const;
  double position_fraction(int position) const;  // 1..3, or 0 for none
  double only_verb_fraction() const;             // of records with an action word
};

ActionWordStats corpus_stats(std::span<const FunctionRecord> records,
                             const text::VerbLexicon& lexicon, std::size_t top_m = 40);

/// FNV-1a 64 of the corpus serialization; used as a provenance stamp.
std::uint64_t content_hash(std::span<const FunctionRecord> records);

}  // namespace awp::corpus
