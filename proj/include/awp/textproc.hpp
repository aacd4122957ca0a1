// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "awp/record.hpp"

namespace awp::text {

/// Splits source text into lowercase word tokens.
///
/// Boundaries fall on every non-alphanumeric character and inside
/// alphanumeric runs at lower->upper, letter->digit and digit->letter
/// transitions ("convertMp3toWav" -> convert, mp, 3, to, wav).
std::vector<std::string> tokenize_code(std::string_view source);

/// Classic Porter (1980) stemmer. Throws DataError on anything other than
/// lowercase ASCII letters.
std::string porter_stem(std::string_view word);

/// Summary-initial words that act as action words without being verbs.
inline constexpr std::string_view kExceptionWords[] = {"is", "to", "if"};
bool is_exception_word(std::string_view token);

/// Closed verb list used in place of a part-of-speech tagger. Lookup is by
/// Porter stem, so inflected surface forms ("sorts", "initializer") match.
class VerbLexicon {
 public:
  VerbLexicon() = default;
  explicit VerbLexicon(std::vector<std::string> verbs,
                       std::vector<std::vector<std::string>> simple_subjects = default_subjects());

  /// Bundled list of common programming verbs.
  static VerbLexicon builtin();

  /// One verb per line; '#' starts a comment; blank lines ignored.
  static VerbLexicon load(const std::filesystem::path& path);

  static std::vector<std::vector<std::string>> default_subjects();

  const std::set<std::string>& verbs() const { return verbs_; }
  const std::vector<std::vector<std::string>>& simple_subjects() const { return subjects_; }

  void add(std::string_view verb);

  /// True when `token` inflects a lexicon verb. Exception words never match
  /// here; they only count in summary-initial position.
  bool is_verb(std::string_view token) const;

 private:
  std::set<std::string> verbs_;
  std::set<std::string> stems_;
  std::vector<std::vector<std::string>> subjects_;
};

struct ActionWordLabel {
  int position = 1;  // 1-based, in {1, 2, 3}
  std::string surface;
  std::string stem;

  bool operator==(const ActionWordLabel&) const = default;
};

/// Locates the action word of a summary:
///  - a leading "is", "to" or "if" is the action word, unstemmed;
///  - otherwise, after skipping a leading simple subject, the first lexicon
///    verb within positions 1..3;
///  - otherwise none.
std::optional<ActionWordLabel> extract_action_word(std::span<const std::string> summary,
                                                   const VerbLexicon& lexicon);

/// Stem used for class mapping: exception words verbatim, Porter otherwise.
std::string action_stem(std::string_view surface);

inline constexpr std::string_view kOtherClass = "other";

/// Ordered top-k action-word stems; class index k is always "other".
class ClassMap {
 public:
  ClassMap() = default;
  ClassMap(std::vector<std::string> stems, std::vector<std::size_t> counts, std::size_t total = 0);

  std::size_t k() const { return stems_.size(); }
  std::size_t num_classes() const { return stems_.size() + 1; }
  std::size_t other_index() const { return stems_.size(); }

  const std::vector<std::string>& stems() const { return stems_; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  /// Label count the map was built from (0 when unknown).
  std::size_t total() const { return total_; }

  /// Share of the labels covered by the k named classes.
  double coverage() const;

  /// Class index for a stem; unknown stems map to "other".
  std::size_t index_of(std::string_view stem) const;
  std::optional<std::size_t> find(std::string_view stem) const;

  /// Display name of a class index ("other" for index k).
  std::string name(std::size_t index) const;

  /// "stem<TAB>count" lines in class order; "other" is implicit.
  std::string to_tsv() const;
  static ClassMap from_tsv(std::string_view text);

  bool operator==(const ClassMap&) const = default;

 private:
  std::vector<std::string> stems_;
  std::vector<std::size_t> counts_;
  std::size_t total_ = 0;
};

/// The k most frequent stems, ties broken lexicographically.
ClassMap build_class_map(std::span<const std::string> stems, std::size_t k);

/// Class index of a record's reference action word ("other" when absent).
std::size_t label_record(const corpus::FunctionRecord& record, const VerbLexicon& lexicon,
                         const ClassMap& class_map);

/// Class index for an arbitrary token sequence (used for model output).
std::size_t label_summary(std::span<const std::string> summary, const VerbLexicon& lexicon,
                          const ClassMap& class_map);

enum class Setting { top40, top10, top10n, getset };

std::string_view to_string(Setting s);
Setting parse_setting(std::string_view name);

struct SettingView {
  std::vector<corpus::FunctionRecord> records;
  ClassMap class_map;
};

/// Re-targets records and class map for one evaluation setting.
///  - top40 / top10: first 40 / 10 classes, the rest fold into "other";
///  - top10n: the first ten classes remaining after dropping get/set/return;
///  - getset: get and set in class-map order, records restricted to those two
///    gold classes.
SettingView derive_setting_view(std::span<const corpus::FunctionRecord> records,
                                const ClassMap& class_map, Setting setting,
                                const VerbLexicon& lexicon);

}  // namespace awp::text
