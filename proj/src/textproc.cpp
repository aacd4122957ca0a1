// SPDX-License-Identifier: Apache-2.0
#include "awp/textproc.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::text {
namespace {

enum class CharClass { other, lower, upper, digit };

CharClass classify(char c) {
  if (c >= 'a' && c <= 'z') return CharClass::lower;
  if (c >= 'A' && c <= 'Z') return CharClass::upper;
  if (c >= '0' && c <= '9') return CharClass::digit;
  return CharClass::other;
}

bool boundary(CharClass prev, CharClass cur) {
  const bool prev_letter = prev == CharClass::lower || prev == CharClass::upper;
  const bool cur_letter = cur == CharClass::lower || cur == CharClass::upper;
  if (prev == CharClass::lower && cur == CharClass::upper) return true;
  if (prev_letter && cur == CharClass::digit) return true;
  if (prev == CharClass::digit && cur_letter) return true;
  return false;
}

}  // namespace

std::vector<std::string> tokenize_code(std::string_view source) {
  std::vector<std::string> tokens;
  std::string current;
  CharClass prev = CharClass::other;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : source) {
    const CharClass cls = classify(c);
    if (cls == CharClass::other) {
      flush();
    } else {
      if (boundary(prev, cls)) flush();
      current += cls == CharClass::upper ? static_cast<char>(c - 'A' + 'a') : c;
    }
    prev = cls;
  }
  flush();
  return tokens;
}

std::string action_stem(std::string_view surface) {
  if (is_exception_word(surface)) return std::string(surface);
  return porter_stem(surface);
}

std::optional<ActionWordLabel> extract_action_word(std::span<const std::string> summary,
                                                   const VerbLexicon& lexicon) {
  if (summary.empty()) return std::nullopt;
  if (is_exception_word(summary[0])) return ActionWordLabel{1, summary[0], summary[0]};

  std::size_t start = 0;
  for (const auto& subject : lexicon.simple_subjects()) {
    if (subject.empty() || subject.size() > summary.size()) continue;
    if (std::equal(subject.begin(), subject.end(), summary.begin())) {
      start = subject.size();
      break;
    }
  }
  const std::size_t end = std::min<std::size_t>(3, summary.size());
  for (std::size_t i = start; i < end; ++i) {
    if (lexicon.is_verb(summary[i])) {
      return ActionWordLabel{static_cast<int>(i + 1), summary[i], porter_stem(summary[i])};
    }
  }
  return std::nullopt;
}

ClassMap::ClassMap(std::vector<std::string> stems, std::vector<std::size_t> counts,
                   std::size_t total)
    : stems_(std::move(stems)), counts_(std::move(counts)), total_(total) {
  if (counts_.size() != stems_.size()) throw DataError("class map: stems and counts differ in length");
  for (std::size_t i = 0; i < stems_.size(); ++i) {
    if (stems_[i] == kOtherClass) throw DataError("class map: 'other' is reserved");
    if (std::find(stems_.begin(), stems_.begin() + static_cast<std::ptrdiff_t>(i), stems_[i]) !=
        stems_.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw DataError("class map: duplicate stem '" + stems_[i] + "'");
    }
    if (i > 0 && counts_[i] > counts_[i - 1]) {
      throw DataError("class map: counts must be non-increasing");
    }
  }
}

double ClassMap::coverage() const {
  if (total_ == 0) return 0.0;
  std::size_t covered = 0;
  for (auto c : counts_) covered += c;
  return static_cast<double>(covered) / static_cast<double>(total_);
}

std::optional<std::size_t> ClassMap::find(std::string_view stem) const {
  for (std::size_t i = 0; i < stems_.size(); ++i) {
    if (stems_[i] == stem) return i;
  }
  return std::nullopt;
}

std::size_t ClassMap::index_of(std::string_view stem) const {
  return find(stem).value_or(other_index());
}

std::string ClassMap::name(std::size_t index) const {
  if (index < stems_.size()) return stems_[index];
  if (index == stems_.size()) return std::string(kOtherClass);
  throw DataError("class index " + std::to_string(index) + " out of range");
}

std::string ClassMap::to_tsv() const {
  std::ostringstream out;
  out << "# total\t" << total_ << '\n';
  for (std::size_t i = 0; i < stems_.size(); ++i) out << stems_[i] << '\t' << counts_[i] << '\n';
  return out.str();
}

ClassMap ClassMap::from_tsv(std::string_view text) {
  std::vector<std::string> stems;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (line.starts_with('#')) {
      if (fields.size() == 2 && fields[0] == "# total") total = std::stoull(fields[1]);
      continue;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw DataError("class map line " + std::to_string(line_no) + ": expected stem<TAB>count");
    }
    try {
      counts.push_back(std::stoull(fields[1]));
    } catch (const std::exception&) {
      throw DataError("class map line " + std::to_string(line_no) + ": bad count");
    }
    stems.push_back(fields[0]);
  }
  return ClassMap(std::move(stems), std::move(counts), total);
}

ClassMap build_class_map(std::span<const std::string> stems, std::size_t k) {
  if (k < 1) throw UsageError("build_class_map: k must be at least 1");
  if (stems.empty()) throw DataError("build_class_map: no action-word labels");
  std::map<std::string, std::size_t> freq;
  for (const auto& s : stems) ++freq[s];
  if (freq.size() < k) {
    throw DataError("build_class_map: only " + std::to_string(freq.size()) +
                    " distinct action words, need " + std::to_string(k));
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  // std::map iteration is lexicographic, so a stable sort on count keeps ties ordered.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> top;
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < k; ++i) {
    top.push_back(ranked[i].first);
    counts.push_back(ranked[i].second);
  }
  return ClassMap(std::move(top), std::move(counts), stems.size());
}

std::size_t label_summary(std::span<const std::string> summary, const VerbLexicon& lexicon,
                          const ClassMap& class_map) {
  const auto aw = extract_action_word(summary, lexicon);
  if (!aw) return class_map.other_index();
  return class_map.index_of(aw->stem);
}

std::size_t label_record(const corpus::FunctionRecord& record, const VerbLexicon& lexicon,
                         const ClassMap& class_map) {
  return label_summary(record.summary_tokens, lexicon, class_map);
}

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::top40: return "top40";
    case Setting::top10: return "top10";
    case Setting::top10n: return "top10n";
    case Setting::getset: return "getset";
  }
  return "?";
}

Setting parse_setting(std::string_view name) {
  if (name == "top40") return Setting::top40;
  if (name == "top10") return Setting::top10;
  if (name == "top10n") return Setting::top10n;
  if (name == "getset") return Setting::getset;
  throw UsageError("unknown setting '" + std::string(name) + "' (top40, top10, top10n, getset)");
}

SettingView derive_setting_view(std::span<const corpus::FunctionRecord> records,
                                const ClassMap& class_map, Setting setting,
                                const VerbLexicon& lexicon) {
  const auto& stems = class_map.stems();
  const auto& counts = class_map.counts();
  const auto take = [&](const std::vector<std::size_t>& indices) {
    std::vector<std::string> s;
    std::vector<std::size_t> c;
    for (auto i : indices) {
      s.push_back(stems[i]);
      c.push_back(counts[i]);
    }
    return ClassMap(std::move(s), std::move(c), class_map.total());
  };

  SettingView view;
  std::vector<std::size_t> chosen;
  switch (setting) {
    case Setting::top40:
    case Setting::top10: {
      const std::size_t n = setting == Setting::top40 ? 40 : 10;
      if (class_map.k() < n) {
        throw DataError("setting " + std::string(to_string(setting)) + " needs " +
                        std::to_string(n) + " classes, class map has " +
                        std::to_string(class_map.k()));
      }
      for (std::size_t i = 0; i < n; ++i) chosen.push_back(i);
      view.records.assign(records.begin(), records.end());
      break;
    }
    case Setting::top10n: {
      for (std::size_t i = 0; i < stems.size() && chosen.size() < 10; ++i) {
        if (stems[i] == "get" || stems[i] == "set" || stems[i] == "return") continue;
        chosen.push_back(i);
      }
      if (chosen.size() < 10) {
        throw DataError("setting top10n needs ten classes besides get/set/return, class map has " +
                        std::to_string(chosen.size()));
      }
      view.records.assign(records.begin(), records.end());
      break;
    }
    case Setting::getset: {
      const auto get = class_map.find("get");
      const auto set = class_map.find("set");
      if (!get || !set) throw DataError("setting getset needs 'get' and 'set' in the class map");
      chosen = {std::min(*get, *set), std::max(*get, *set)};
      for (const auto& r : records) {
        const auto aw = extract_action_word(r.summary_tokens, lexicon);
        if (aw && (aw->stem == "get" || aw->stem == "set")) view.records.push_back(r);
      }
      break;
    }
  }
  view.class_map = take(chosen);
  return view;
}

}  // namespace awp::text
