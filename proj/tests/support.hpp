// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "awp/corpus.hpp"
#include "awp/metrics.hpp"
#include "awp/network.hpp"
#include "awp/synthgen.hpp"
#include "awp/textproc.hpp"
#include "awp/train.hpp"

namespace awp::testing {

inline std::filesystem::path data_dir() { return AWP_TEST_DATA_DIR; }

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("awp-test-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// A synthetic corpus split by project with a class map from its train part.
struct Experiment {
  std::vector<corpus::FunctionRecord> train, val, test;
  text::ClassMap class_map;
  text::VerbLexicon lexicon = text::VerbLexicon::builtin();
};

inline Experiment make_experiment(const std::vector<corpus::FunctionRecord>& records,
                                  const corpus::SplitRatios& ratios, std::size_t k,
                                  text::Setting setting) {
  Experiment e;
  const auto split = corpus::split_by_project(records, ratios, 1);
  const auto train = corpus::select(records, split.train_ids);
  std::vector<std::string> stems;
  for (const auto& r : train) {
    if (auto aw = text::extract_action_word(r.summary_tokens, e.lexicon)) stems.push_back(aw->stem);
  }
  const auto top = text::build_class_map(stems, k);
  const text::ClassMap full(top.stems(), top.counts(), train.size());
  const auto view = [&](const std::vector<std::string>& ids) {
    return text::derive_setting_view(corpus::select(records, ids), full, setting, e.lexicon);
  };
  auto tv = view(split.train_ids);
  e.train = std::move(tv.records);
  e.class_map = std::move(tv.class_map);
  e.val = view(split.val_ids).records;
  e.test = view(split.test_ids).records;
  return e;
}

inline std::vector<std::size_t> gold_labels(const Experiment& e, const std::vector<corpus::FunctionRecord>& records) {
  std::vector<std::size_t> out;
  for (const auto& r : records) out.push_back(text::label_record(r, e.lexicon, e.class_map));
  return out;
}

inline std::vector<std::size_t> predicted_labels(const Experiment& e, const model::Model& m,
                                                 const std::vector<corpus::FunctionRecord>& records) {
  std::vector<std::size_t> out;
  for (const auto& r : records) out.push_back(model::classify_action_word(m, r, e.class_map, e.lexicon).label);
  return out;
}

}  // namespace awp::testing
