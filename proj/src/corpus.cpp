// SPDX-License-Identifier: Apache-2.0
#include "awp/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::corpus {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> token_array(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) fail(line, std::string("missing field '") + key + "'");
  const auto& arr = obj.at(key);
  if (!arr.is_array()) fail(line, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const auto& t : arr) {
    if (!t.is_string()) fail(line, std::string("field '") + key + "' must hold strings");
    const auto& s = t.get_ref<const std::string&>();
    if (s.empty()) fail(line, std::string("empty token in '") + key + "'");
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        fail(line, std::string("token with whitespace in '") + key + "'");
      }
      if (c >= 'A' && c <= 'Z') fail(line, std::string("token not lowercase in '") + key + "'");
    }
    out.push_back(s);
  }
  return out;
}

std::string string_field(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) fail(line, std::string("missing field '") + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(line, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

FunctionRecord parse_record(std::string_view line_text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(line_text);
  } catch (const json::parse_error& e) {
    fail(line, std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) fail(line, "expected a JSON object");

  FunctionRecord r;
  r.id = string_field(obj, "id", line);
  if (r.id.empty()) fail(line, "empty id");
  r.project_id = string_field(obj, "project", line);
  try {
    r.language = parse_language(string_field(obj, "language", line));
  } catch (const UsageError& e) {
    fail(line, e.what());
  }
  r.code_tokens = token_array(obj, "code_tokens", line);
  const std::string ast_text = string_field(obj, "ast", line);
  if (!trim(ast_text).empty()) {
    try {
      r.ast = ast::parse_sexpr(ast_text);
    } catch (const ParseError& e) {
      fail(line, std::string("ast: ") + e.what());
    }
  }
  r.summary_tokens = token_array(obj, "summary_tokens", line);
  if (obj.contains("raw_code") && !obj.at("raw_code").is_null()) {
    if (!obj.at("raw_code").is_string()) fail(line, "field 'raw_code' must be a string");
    r.raw_code = obj.at("raw_code").get<std::string>();
  }
  return r;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::java: return "java";
    case Language::c_cpp: return "c_cpp";
    case Language::synthetic: return "synthetic";
  }
  return "?";
}

Language parse_language(std::string_view name) {
  if (name == "java") return Language::java;
  if (name == "c_cpp") return Language::c_cpp;
  if (name == "synthetic") return Language::synthetic;
  throw UsageError("unknown language '" + std::string(name) + "'");
}

std::vector<FunctionRecord> parse_corpus(std::string_view text) {
  std::vector<FunctionRecord> records;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = text.substr(start, end - start);
    start = end + 1;
    if (trim(line).empty()) continue;
    auto r = parse_record(line, line_no);
    if (!ids.insert(r.id).second) fail(line_no, "duplicate id '" + r.id + "'");
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<FunctionRecord> load_corpus(const std::filesystem::path& path) {
  try {
    return parse_corpus(read_file(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string to_jsonl(std::span<const FunctionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    json obj;
    obj["id"] = r.id;
    obj["project"] = r.project_id;
    obj["language"] = std::string(to_string(r.language));
    obj["code_tokens"] = r.code_tokens;
    obj["ast"] = r.ast ? ast::serialize_sexpr(*r.ast) : std::string();
    obj["summary_tokens"] = r.summary_tokens;
    if (r.raw_code) obj["raw_code"] = *r.raw_code;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const std::filesystem::path& path, std::span<const FunctionRecord> records) {
  write_file_atomic(path, to_jsonl(records));
}

std::vector<FunctionRecord> filter_quality(std::span<const FunctionRecord> records,
                                           const QualityLimits& limits) {
  if (limits.min_summary_len < 1 || limits.max_summary_len < limits.min_summary_len) {
    throw UsageError("filter_quality: need 1 <= min_summary_len <= max_summary_len");
  }
  std::vector<FunctionRecord> kept;
  for (const auto& r : records) {
    const auto n = r.summary_tokens.size();
    if (n < limits.min_summary_len || n > limits.max_summary_len) continue;
    if (r.code_tokens.empty() || r.code_tokens.size() > limits.max_code_len) continue;
    kept.push_back(r);
  }
  return kept;
}

std::vector<FunctionRecord> filter_generated(std::span<const FunctionRecord> records,
                                             std::span<const std::string> markers) {
  std::vector<std::string> lowered;
  for (const auto& m : markers) lowered.push_back(lower(m));
  std::vector<FunctionRecord> kept;
  for (const auto& r : records) {
    bool generated = false;
    if (r.raw_code) {
      const auto code = lower(*r.raw_code);
      generated = std::any_of(lowered.begin(), lowered.end(),
                              [&](const std::string& m) { return code.find(m) != std::string::npos; });
    }
    if (!generated) kept.push_back(r);
  }
  return kept;
}

std::string DatasetSplit::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "# seed=" << seed << " ratios=" << ratios.train << ',' << ratios.val << ',' << ratios.test
      << '\n';
  const auto section = [&](const char* name, const std::vector<std::string>& ids) {
    out << '[' << name << "]\n";
    for (const auto& id : ids) out << id << '\n';
  };
  section("train", train_ids);
  section("val", val_ids);
  section("test", test_ids);
  return out.str();
}

DatasetSplit DatasetSplit::from_text(std::string_view text) {
  DatasetSplit s;
  std::vector<std::string>* current = nullptr;
  bool header = false;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.starts_with("# seed=")) {
      unsigned long long seed = 0;
      double a = 0, b = 0, c = 0;
      const std::string l(line);
      if (std::sscanf(l.c_str(), "# seed=%llu ratios=%lf,%lf,%lf", &seed, &a, &b, &c) != 4) {
        throw DataError("split file line " + std::to_string(line_no) + ": malformed header");
      }
      s.seed = seed;
      s.ratios = {a, b, c};
      header = true;
    } else if (line == "[train]") {
      current = &s.train_ids;
    } else if (line == "[val]") {
      current = &s.val_ids;
    } else if (line == "[test]") {
      current = &s.test_ids;
    } else if (current == nullptr) {
      throw DataError("split file line " + std::to_string(line_no) + ": id outside a section");
    } else {
      current->emplace_back(line);
    }
  }
  if (!header) throw DataError("split file: missing header line");
  return s;
}

std::uint64_t project_key(std::uint64_t seed, std::string_view project_id) {
  return fnv1a(project_id, fnv1a_u64(seed));
}

DatasetSplit split_by_project(std::span<const FunctionRecord> records, const SplitRatios& ratios,
                              std::uint64_t seed) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (ratios.train <= 0 || ratios.val <= 0 || ratios.test <= 0 || std::abs(sum - 1.0) > 1e-9) {
    throw UsageError("split ratios must be positive and sum to 1");
  }
  std::map<std::string, std::vector<std::string>> by_project;
  for (const auto& r : records) by_project[r.project_id].push_back(r.id);
  if (by_project.size() < 3) {
    throw DataError("split_by_project: need at least 3 projects, corpus has " +
                    std::to_string(by_project.size()));
  }

  struct Project {
    std::uint64_t key;
    const std::string* id;
    const std::vector<std::string>* members;
  };
  std::vector<Project> order;
  for (const auto& [pid, ids] : by_project) order.push_back({project_key(seed, pid), &pid, &ids});
  std::sort(order.begin(), order.end(), [](const Project& a, const Project& b) {
    return a.key != b.key ? a.key < b.key : *a.id < *b.id;
  });

  const double n = static_cast<double>(records.size());
  const std::array<double, 3> target{ratios.train * n, ratios.val * n, ratios.test * n};
  std::array<double, 3> filled{0, 0, 0};
  std::array<std::size_t, 3> projects_in{0, 0, 0};
  DatasetSplit out;
  out.seed = seed;
  out.ratios = ratios;
  std::array<std::vector<std::string>*, 3> buckets{&out.train_ids, &out.val_ids, &out.test_ids};

  for (std::size_t p = 0; p < order.size(); ++p) {
    const double size = static_cast<double>(order[p].members->size());
    const std::size_t remaining = order.size() - p;
    std::size_t empty = 0;
    for (auto c : projects_in) empty += c == 0;

    int choice = -1;
    const auto deficit = [&](int s) { return target[s] - filled[s]; };
    if (remaining <= empty) {
      for (int s = 0; s < 3; ++s) {
        if (projects_in[s] == 0 && (choice < 0 || deficit(s) > deficit(choice))) choice = s;
      }
    } else {
      for (int s = 0; s < 3; ++s) {
        if (deficit(s) + 1e-9 >= size && (choice < 0 || deficit(s) < deficit(choice))) choice = s;
      }
      if (choice < 0) {
        for (int s = 0; s < 3; ++s) {
          if (choice < 0 || deficit(s) > deficit(choice)) choice = s;
        }
      }
    }
    filled[choice] += size;
    ++projects_in[choice];
    auto& bucket = *buckets[choice];
    bucket.insert(bucket.end(), order[p].members->begin(), order[p].members->end());
  }
  // Emit ids in corpus order within each split.
  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < records.size(); ++i) position[records[i].id] = i;
  for (auto* bucket : buckets) {
    std::sort(bucket->begin(), bucket->end(),
              [&](const std::string& a, const std::string& b) { return position[a] < position[b]; });
  }
  return out;
}

std::vector<FunctionRecord> select(std::span<const FunctionRecord> records,
                                   std::span<const std::string> ids) {
  std::unordered_set<std::string_view> wanted(ids.begin(), ids.end());
  std::vector<FunctionRecord> out;
  for (const auto& r : records) {
    if (wanted.contains(r.id)) out.push_back(r);
  }
  if (out.size() != wanted.size()) {
    throw DataError("split references " + std::to_string(wanted.size() - out.size()) +
                    " ids missing from the corpus");
  }
  return out;
}

std::vector<FunctionRecord> subsample(std::span<const FunctionRecord> records, std::size_t n,
                                      std::uint64_t seed) {
  if (n > records.size()) {
    throw UsageError("subsample: n = " + std::to_string(n) + " exceeds corpus size " +
                     std::to_string(records.size()));
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx.begin(), idx.end());
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<FunctionRecord> out;
  out.reserve(n);
  for (auto i : idx) out.push_back(records[i]);
  return out;
}

double ActionWordStats::action_word_fraction() const {
  return total ? static_cast<double>(with_action_word) / static_cast<double>(total) : 0.0;
}

double ActionWordStats::position_fraction(int position) const {
  if (position < 0 || position > 3) throw UsageError("position must be 0..3");
  const std::size_t count = position == 0 ? position_counts[3] : position_counts[position - 1];
  return total ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
}

double ActionWordStats::only_verb_fraction() const {
  return with_action_word ? static_cast<double>(only_verb) / static_cast<double>(with_action_word)
                          : 0.0;
}

ActionWordStats corpus_stats(std::span<const FunctionRecord> records,
                             const text::VerbLexicon& lexicon, std::size_t top_m) {
  if (records.empty()) throw DataError("corpus_stats: empty corpus");
  ActionWordStats stats;
  stats.total = records.size();
  std::map<std::string, std::size_t> freq;
  for (const auto& r : records) {
    const auto aw = text::extract_action_word(r.summary_tokens, lexicon);
    if (!aw) {
      ++stats.position_counts[3];
      continue;
    }
    ++stats.with_action_word;
    ++stats.position_counts[static_cast<std::size_t>(aw->position - 1)];
    ++freq[aw->stem];
    bool other_verb = false;
    for (std::size_t i = 0; i < r.summary_tokens.size(); ++i) {
      if (static_cast<int>(i) + 1 == aw->position) continue;
      if (lexicon.is_verb(r.summary_tokens[i])) other_verb = true;
    }
    if (!other_verb) ++stats.only_verb;
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > top_m) ranked.resize(top_m);
  stats.top_stems = std::move(ranked);
  return stats;
}

std::uint64_t content_hash(std::span<const FunctionRecord> records) {
  return fnv1a(to_jsonl(records));
}

}  // namespace awp::corpus
