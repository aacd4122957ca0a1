// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cstdio>
#include <sys/wait.h>

#include "awp/error.hpp"
#include "awp/pipeline.hpp"
#include "awp/util.hpp"
#include "support.hpp"

namespace awp::pipeline {
namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;
};

// Runs the awp binary inside `dir`, capturing stdout and stderr together.
RunResult run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" AWP_CLI_PATH "' " + args + " 2>&1";
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

TEST(Config, Defaults) {
  const auto c = Config::resolve({}, std::nullopt);
  EXPECT_EQ(c.get("variant"), "ast-attendgru");
  EXPECT_EQ(c.count("k"), 40u);
  EXPECT_DOUBLE_EQ(c.number("clip"), 5.0);
  EXPECT_FALSE(c.flag("bleu_percent"));
  EXPECT_NE(c.to_text().find("setting=top40\n"), std::string::npos);
}

TEST(Config, FlagBeatsFileBeatsBase) {
  const auto dir = testing::scratch_dir("config");
  write_file_atomic(dir / "exp.cfg", "# experiment\nepochs=7\nbatch=4\n");
  const auto c = Config::resolve({{"epochs", "9"}}, dir / "exp.cfg", {{"batch", "2"}, {"hidden", "16"}});
  EXPECT_EQ(c.count("epochs"), 9u);
  EXPECT_EQ(c.count("batch"), 4u);
  EXPECT_EQ(c.count("hidden"), 16u);
  EXPECT_EQ(c.count("embed"), 32u);
  fs::remove_all(dir);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_key_values("epoch=3\n", "x.cfg"), UsageError);
  EXPECT_THROW(parse_key_values("no equals sign\n", "x.cfg"), UsageError);
  EXPECT_THROW(Config::resolve({{"variant", "transformer"}}, std::nullopt), UsageError);
  EXPECT_THROW(Config::resolve({{"epochs", "-1"}}, std::nullopt), UsageError);
  EXPECT_THROW(Config::resolve({}, fs::path("/nonexistent/awp.cfg")), Error);
}

TEST(ExitCode, MapsErrorKinds) {
  EXPECT_EQ(exit_code(UsageError("u")), 1);
  EXPECT_EQ(exit_code(DataError("d")), 2);
  EXPECT_EQ(exit_code(ParseError("p", 3)), 2);
  EXPECT_EQ(exit_code(NumericError("n")), 3);
}

TEST(Cli, UnknownOptionIsAUsageError) {
  const auto dir = testing::scratch_dir("cli-usage");
  EXPECT_EQ(run_cli(dir, "train --no-such-flag 1").status, 1);
  EXPECT_EQ(run_cli(dir, "build --corpus missing.jsonl --out b").status, 2);
  fs::remove_all(dir);
}

TEST(Cli, AttendgruIsRejectedInChallengeCondition) {
  const auto dir = testing::scratch_dir("cli-challenge");
  ASSERT_EQ(run_cli(dir, "synth --n 60 --seed 3 --out c.jsonl").status, 0);
  ASSERT_EQ(run_cli(dir, "build --corpus c.jsonl --out b --k 5").status, 0);
  const auto r = run_cli(dir, "train --build b --out r --variant attendgru --condition challenge --epochs 1");
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("challenge"), std::string::npos);
  fs::remove_all(dir);
}

class GoldenPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::scratch_dir("cli-golden");
    for (const char* step : {"synth --n 200 --seed 42 --out corpus.jsonl",
                             "build --corpus corpus.jsonl --out build --k 10",
                             "train --build build --out run --setting top10 --epochs 40 --lr 1 --batch 8",
                             "eval --run run --out eval"}) {
      const auto r = run_cli(dir_, step);
      ASSERT_EQ(r.status, 0) << step << "\n" << r.output;
    }
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static fs::path dir_;
};
fs::path GoldenPipeline::dir_;

TEST_F(GoldenPipeline, FixtureCorpusMatches) {
  EXPECT_EQ(testing::slurp(dir_ / "corpus.jsonl"), testing::slurp(testing::data_dir() / "fixture_corpus.jsonl"));
}

TEST_F(GoldenPipeline, ReportsMatchGoldenFiles) {
  for (const char* f : {"report.txt", "confusion.tsv", "recall.tsv", "predictions.tsv"}) {
    const auto golden = testing::data_dir() / "golden" / f;
    ASSERT_TRUE(fs::exists(golden)) << golden;
    EXPECT_EQ(testing::slurp(dir_ / "eval" / f), testing::slurp(golden)) << f;
  }
}

TEST_F(GoldenPipeline, ArtifactsCarryProvenance) {
  for (const char* f : {"eval/report.txt", "eval/confusion.tsv", "run/train_log.tsv", "run/config.txt"}) {
    EXPECT_TRUE(testing::slurp(dir_ / f).starts_with("# corpus_hash=")) << f;
  }
}

TEST_F(GoldenPipeline, EvalWithoutCheckpointFails) {
  const auto run2 = dir_ / "run2";
  fs::create_directories(run2);
  fs::copy_file(dir_ / "run" / "config.txt", run2 / "config.txt");
  const auto r = run_cli(dir_, "eval --run run2 --out eval2");
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("checkpoint not found"), std::string::npos) << r.output;
}

}  // namespace
}  // namespace awp::pipeline
