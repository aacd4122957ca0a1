// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <unordered_map>

#include "awp/corpus.hpp"
#include "awp/error.hpp"
#include "awp/util.hpp"
#include "support.hpp"

namespace awp::corpus {
namespace {

FunctionRecord rec(const std::string& id, const std::string& project, std::size_t summary_len = 4,
                   std::size_t code_len = 5) {
  FunctionRecord r;
  r.id = id;
  r.project_id = project;
  r.code_tokens.assign(code_len, "x");
  r.summary_tokens.assign(summary_len, "w");
  return r;
}

std::string line(const std::string& id, const std::string& extra = "") {
  return R"j({"id":")j" + id +
         R"j(","project":"p","language":"java","code_tokens":["a"],"ast":"(m (n id:a))","summary_tokens":["gets","a"])j" +
         extra + "}\n";
}

TEST(LoadCorpus, EmptyTextGivesNoRecords) { EXPECT_TRUE(parse_corpus("").empty()); }

TEST(LoadCorpus, OneRecord) {
  const auto records = parse_corpus(line("r1", R"j(,"raw_code":"int a() {}")j"));
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].id, "r1");
  EXPECT_EQ(records[0].summary_tokens, (std::vector<std::string>{"gets", "a"}));
  ASSERT_TRUE(records[0].ast);
  EXPECT_EQ(records[0].ast->label, "m");
  EXPECT_EQ(records[0].raw_code, "int a() {}");
}

TEST(LoadCorpus, MissingFieldNamesTheLine) {
  const std::string bad = R"j({"id":"r3","project":"p","language":"java","code_tokens":["a"],"ast":""})j";
  try {
    parse_corpus(line("r1") + line("r2") + bad + "\n");
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3: missing field 'summary_tokens'"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, RejectsDuplicatesAndBadTokens) {
  EXPECT_THROW(parse_corpus(line("r1") + line("r1")), DataError);
  EXPECT_THROW(parse_corpus(R"j({"id":"r1","project":"p","language":"java","code_tokens":["A"],"ast":"","summary_tokens":["x"]})j"), DataError);
  EXPECT_THROW(parse_corpus("{not json}\n"), DataError);
  EXPECT_THROW(parse_corpus(R"j({"id":"r1","project":"p","language":"java","code_tokens":["a"],"ast":"(m (n","summary_tokens":["x"]})j"), DataError);
}

TEST(LoadCorpus, SaveLoadRoundTrip) {
  const auto records = load_corpus(testing::data_dir() / "fixture_corpus.jsonl");
  ASSERT_EQ(records.size(), 200u);
  const auto dir = testing::scratch_dir("corpus-rt");
  save_corpus(dir / "c.jsonl", records);
  EXPECT_EQ(load_corpus(dir / "c.jsonl"), records);
  EXPECT_EQ(content_hash(load_corpus(dir / "c.jsonl")), content_hash(records));
  std::filesystem::remove_all(dir);
}

TEST(FilterQuality, KeepsRecordsInRange) {
  std::vector<FunctionRecord> records;
  const std::size_t summary_lens[] = {1, 2, 3, 5, 13, 14, 20, 4, 6, 3};
  const std::size_t code_lens[] = {5, 5, 5, 5, 5, 5, 5, 0, 101, 100};
  for (std::size_t i = 0; i < 10; ++i) {
    records.push_back(rec("r" + std::to_string(i), "p", summary_lens[i], code_lens[i]));
  }
  const auto kept = filter_quality(records, {});
  std::vector<std::string> ids;
  for (const auto& r : kept) ids.push_back(r.id);
  EXPECT_EQ(ids, (std::vector<std::string>{"r2", "r3", "r4", "r9"}));
  EXPECT_EQ(filter_quality(kept, {}), kept);
  EXPECT_THROW(filter_quality(records, {5, 4, 100}), UsageError);
}

TEST(FilterGenerated, MarkersAreCaseInsensitive) {
  std::vector<FunctionRecord> records{rec("a", "p"), rec("b", "p"), rec("c", "p")};
  records[0].raw_code = "// Generated By tool\nint f();";
  records[1].raw_code = "int g();";
  const auto kept = filter_generated(records, default_generated_markers());
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "b");
  EXPECT_EQ(kept[1].id, "c");
}

std::vector<FunctionRecord> projects_corpus(std::size_t projects, std::size_t per_project) {
  std::vector<FunctionRecord> out;
  for (std::size_t p = 0; p < projects; ++p) {
    for (std::size_t i = 0; i < per_project; ++i) {
      out.push_back(rec("p" + std::to_string(p) + "-" + std::to_string(i), "proj" + std::to_string(p)));
    }
  }
  return out;
}

void expect_valid_split(const std::vector<FunctionRecord>& records, const DatasetSplit& s) {
  std::unordered_map<std::string, std::string> project_of;
  for (const auto& r : records) project_of[r.id] = r.project_id;
  std::set<std::string> seen;
  std::vector<std::set<std::string>> projects(3);
  const std::vector<std::string>* parts[] = {&s.train_ids, &s.val_ids, &s.test_ids};
  for (int k = 0; k < 3; ++k) {
    EXPECT_FALSE(parts[k]->empty());
    for (const auto& id : *parts[k]) {
      EXPECT_TRUE(seen.insert(id).second) << id;
      projects[k].insert(project_of.at(id));
    }
  }
  EXPECT_EQ(seen.size(), records.size());
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      for (const auto& p : projects[a]) EXPECT_FALSE(projects[b].contains(p)) << p;
    }
  }
}

TEST(SplitByProject, TenEqualProjects) {
  const auto records = projects_corpus(10, 10);
  const auto s = split_by_project(records, {0.8, 0.1, 0.1}, 1);
  EXPECT_EQ(s.train_ids.size(), 80u);
  EXPECT_EQ(s.val_ids.size(), 10u);
  EXPECT_EQ(s.test_ids.size(), 10u);
  expect_valid_split(records, s);
}

TEST(SplitByProject, DeterministicAndSeedSensitive) {
  const auto records = projects_corpus(10, 10);
  const auto a = split_by_project(records, {}, 1);
  const auto b = split_by_project(records, {}, 1);
  const auto c = split_by_project(records, {}, 2);
  EXPECT_EQ(a.train_ids, b.train_ids);
  EXPECT_EQ(a.test_ids, b.test_ids);
  EXPECT_TRUE(a.test_ids != c.test_ids || a.val_ids != c.val_ids);
  expect_valid_split(records, c);
}

TEST(SplitByProject, NeedsThreeProjects) {
  EXPECT_THROW(split_by_project(projects_corpus(2, 5), {}, 1), DataError);
  EXPECT_THROW(split_by_project(projects_corpus(5, 5), {0.5, 0.5, 0.0}, 1), UsageError);
}

TEST(SplitByProject, PropertiesOverUnevenProjects) {
  Rng rng(99);
  for (std::size_t projects = 3; projects <= 20; ++projects) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::vector<FunctionRecord> records;
      for (std::size_t p = 0; p < projects; ++p) {
        const auto size = 1 + rng.below(30);
        for (std::uint64_t i = 0; i < size; ++i) {
          records.push_back(rec("p" + std::to_string(p) + "-" + std::to_string(i), "q" + std::to_string(p)));
        }
      }
      const auto s = split_by_project(records, {}, seed);
      expect_valid_split(records, s);
      const auto text = s.to_text();
      const auto back = DatasetSplit::from_text(text);
      EXPECT_EQ(back.train_ids, s.train_ids);
      EXPECT_EQ(back.val_ids, s.val_ids);
      EXPECT_EQ(back.test_ids, s.test_ids);
      EXPECT_EQ(back.seed, seed);
    }
  }
}

TEST(Select, KeepsCorpusOrderAndRejectsUnknownIds) {
  const auto records = projects_corpus(3, 3);
  const std::vector<std::string> ids{"p2-0", "p0-1"};
  const auto picked = select(records, ids);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(picked[0].id, "p0-1");
  EXPECT_THROW(select(records, std::vector<std::string>{"nope"}), DataError);
}

TEST(Subsample, SizeOrderAndDeterminism) {
  const auto records = projects_corpus(5, 20);
  const auto a = subsample(records, 30, 4);
  ASSERT_EQ(a.size(), 30u);
  EXPECT_EQ(a, subsample(records, 30, 4));
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < records.size(); ++i) pos[records[i].id] = i;
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(pos[a[i - 1].id], pos[a[i].id]);
  EXPECT_EQ(subsample(records, records.size(), 1), records);
  EXPECT_THROW(subsample(records, records.size() + 1, 1), UsageError);
}

TEST(CorpusStats, HandTalliedFixture) {
  const text::VerbLexicon lex({"return", "get", "set", "sort", "compute"});
  const char* summaries[] = {"returns the count",     "returns sorted list", "gets the value",
                             "this method sets the size", "it computes total", "is the list empty",
                             "the main loop",          "to string",          "value of the field",
                             "it returns the value",   "the sorted values",  "a list to get"};
  std::vector<FunctionRecord> records;
  for (std::size_t i = 0; i < std::size(summaries); ++i) {
    auto r = rec("s" + std::to_string(i), "p");
    r.summary_tokens = split(summaries[i], ' ');
    records.push_back(r);
  }
  const auto stats = corpus_stats(records, lex, 40);
  EXPECT_EQ(stats.total, 12u);
  EXPECT_EQ(stats.with_action_word, 9u);
  EXPECT_EQ(stats.position_counts, (std::array<std::size_t, 4>{5, 3, 1, 3}));
  EXPECT_EQ(stats.only_verb, 8u);
  EXPECT_DOUBLE_EQ(stats.action_word_fraction(), 0.75);
  EXPECT_DOUBLE_EQ(stats.position_fraction(0), 0.25);
  EXPECT_DOUBLE_EQ(stats.only_verb_fraction(), 8.0 / 9.0);
  const std::vector<std::pair<std::string, std::size_t>> top{
      {"return", 3}, {"comput", 1}, {"get", 1}, {"is", 1}, {"set", 1}, {"sort", 1}, {"to", 1}};
  EXPECT_EQ(stats.top_stems, top);
  EXPECT_EQ(corpus_stats(records, lex, 2).top_stems.size(), 2u);
  EXPECT_THROW(corpus_stats(std::vector<FunctionRecord>{}, lex), DataError);
}

}  // namespace
}  // namespace awp::corpus
