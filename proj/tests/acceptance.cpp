// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "awp/ast.hpp"
#include "awp/pipeline.hpp"
#include "awp/util.hpp"
#include "support.hpp"

namespace {

using namespace awp;
using awp::testing::Experiment;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome porter_oracle() {
  const auto start = Clock::now();
  std::istringstream in(testing::slurp(testing::data_dir() / "porter_oracle.tsv"));
  std::string line;
  std::size_t words = 0, mismatches = 0;
  std::string first_bad;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    ++words;
    const auto got = text::porter_stem(cols.at(0));
    if (got != cols.at(1)) {
      if (!mismatches++) first_bad = cols[0] + " -> " + got + " (want " + cols[1] + ")";
    }
  }
  const double secs = seconds_since(start);
  return {words == 100 && mismatches == 0 && secs < 1.0,
          std::to_string(words) + " words, " + std::to_string(mismatches) + " mismatches, " + num(secs, 3) +
              " s" + (first_bad.empty() ? "" : "; first: " + first_bad)};
}

Outcome tokenizer_golden() {
  const std::string raw =
      "const char *sctp_cname(const sctp_subtype_t cid)\n{\nif (cid.chunk < 0)\nreturn \"illegal chunk";
  const std::string want = "const char sctp cname const sctp subtype t cid if cid chunk 0 return illegal chunk";
  const auto got = join(text::tokenize_code(raw), " ");
  return {got == want, "\"" + got + "\""};
}

Outcome extraction_fixture() {
  const auto lexicon = text::VerbLexicon::builtin();
  std::istringstream in(testing::slurp(testing::data_dir() / "extraction_fixture.tsv"));
  std::string line;
  std::size_t total = 0, agree = 0;
  std::string first_bad;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    ++total;
    const auto aw = text::extract_action_word(split(cols.at(0), ' '), lexicon);
    const int position = aw ? aw->position : 0;
    const std::string surface = aw ? aw->surface : "-";
    if (std::to_string(position) == cols.at(1) && surface == cols.at(2)) {
      ++agree;
    } else if (first_bad.empty()) {
      first_bad = "; first disagreement: " + cols[0];
    }
  }
  return {total == 50 && agree == total, std::to_string(agree) + "/" + std::to_string(total) + " agree" + first_bad};
}

/// Max relative error between backprop and central differences.
double gradient_error(model::Variant variant, model::Objective objective) {
  model::Dims d;
  d.embed = 5;
  d.hidden = 8;
  d.code_vocab = 9;
  d.ast_vocab = 8;
  d.summary_vocab = 7;
  d.classes = 4;
  d.variant = variant;
  d.objective = objective;
  auto params = model::ModelParams::initialize(d, 11);
  // Larger weights than the initializer draws so every gate is exercised.
  params.visit([](const std::string&, auto& a) { a *= 10.0; });

  model::Example ex;
  ex.code = {4, 5, 6, 7, 8};
  ex.ast = {4, 5, 6, 7, 5};
  ex.summary = {4, 5, 6, 2};
  ex.label = 2;

  auto grad = model::ModelParams::zeros(d);
  model::example_loss(params, ex, &grad);
  std::vector<double> analytic;
  grad.visit([&](const std::string&, const auto& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) analytic.push_back(a.data()[i]);
  });

  constexpr double eps = 1e-4;
  double worst = 0.0;
  std::size_t index = 0;
  params.visit([&](const std::string&, auto& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double saved = a.data()[i];
      a.data()[i] = saved + eps;
      const double up = model::example_loss(params, ex, nullptr);
      a.data()[i] = saved - eps;
      const double down = model::example_loss(params, ex, nullptr);
      a.data()[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double exact = analytic[index++];
      // Entries whose gradient is within finite-difference noise of zero use an absolute floor.
      const double scale = std::max({std::abs(numeric), std::abs(exact), 1e-6});
      worst = std::max(worst, std::abs(numeric - exact) / scale);
    }
  });
  return worst;
}

Outcome gradient_check() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string detail;
  for (auto variant : {model::Variant::attendgru, model::Variant::ast_attendgru}) {
    for (auto objective : {model::Objective::summary, model::Objective::action_word}) {
      const double e = gradient_error(variant, objective);
      worst = std::max(worst, e);
      detail += std::string(model::to_string(variant)) + "/" + std::string(model::to_string(objective)) + " " +
                [&] {
                  char buf[32];
                  std::snprintf(buf, sizeof(buf), "%.2e", e);
                  return std::string(buf);
                }() + "; ";
    }
  }
  const double secs = seconds_since(start);
  return {worst < 1e-5 && secs < 30.0, detail + num(secs, 2) + " s"};
}

Outcome overfit() {
  const auto start = Clock::now();
  const auto records = synth::generate({}, 50, 5, 5);
  Experiment e;
  std::vector<std::string> stems;
  for (const auto& r : records) stems.push_back(text::extract_action_word(r.summary_tokens, e.lexicon)->stem);
  e.class_map = text::build_class_map(stems, 10);

  model::TrainConfig tc;
  tc.objective = model::Objective::action_word;
  tc.epochs_max = 200;
  tc.batch_size = 10;
  tc.learning_rate = 0.5;
  tc.stop_loss = 0.05;
  tc.seed = 3;
  const auto vocabs = model::build_vocabs(records, tc.input.mode, 5000);
  const auto result = model::train(records, records, vocabs, tc, e.lexicon, e.class_map);
  double min_loss = 1e9;
  for (const auto& l : result.log) min_loss = std::min(min_loss, l.train_loss);
  const model::Model m{result.params, vocabs, tc.input};
  const double acc = model::class_accuracy(m, records, e.lexicon, e.class_map);
  const double secs = seconds_since(start);
  return {min_loss < 0.05 && acc == 1.0 && secs < 300.0,
          "loss " + num(min_loss) + " after " + std::to_string(result.log.size()) + " epochs, train accuracy " +
              num(acc) + ", " + num(secs, 1) + " s"};
}

double getset_f1(const Experiment& e, model::Mode mode) {
  model::TrainConfig tc;
  tc.objective = model::Objective::action_word;
  tc.input.variant = model::Variant::ast_attendgru;
  tc.input.mode = mode;
  tc.epochs_max = 5;
  tc.seed = 1;
  const auto vocabs = model::build_vocabs(e.train, mode, 5000);
  const auto result = model::train(e.train, e.val, vocabs, tc, e.lexicon, e.class_map);
  const model::Model m{result.params, vocabs, tc.input};
  const auto matrix = metrics::confusion(testing::gold_labels(e, e.test), testing::predicted_labels(e, m, e.test),
                                         e.class_map);
  return metrics::precision_recall_f(matrix, metrics::Averaging::macro, false).f1;
}

Outcome getset_diagnostic() {
  const auto start = Clock::now();
  synth::TemplateSpec spec;
  spec.classes = {"get", "set"};
  const auto records = synth::generate(spec, 2000, 7, 10);
  const auto e = testing::make_experiment(records, {0.7, 0.1, 0.2}, 2, text::Setting::getset);
  const double standard = getset_f1(e, model::Mode::standard);
  const double challenge = getset_f1(e, model::Mode::challenge);
  const double secs = seconds_since(start);
  return {e.test.size() == 400 && standard >= 0.95 && challenge >= 0.90 && secs < 1800.0,
          "test " + std::to_string(e.test.size()) + ", standard F1 " + num(standard) + ", challenge F1 " +
              num(challenge) + ", " + num(secs, 1) + " s"};
}

Outcome metric_oracles() {
  std::vector<std::string> failures;
  const auto near = [&](double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) failures.push_back(what + "=" + std::to_string(got));
  };
  {
    // gold [A,A,B,B], pred [A,B,B,B]; B is the catch-all class.
    const text::ClassMap cm({"a"}, {2});
    const std::vector<std::size_t> gold{0, 0, 1, 1}, pred{0, 1, 1, 1};
    const auto m = metrics::confusion(gold, pred, cm);
    if (m.at(0, 0) != 1 || m.at(0, 1) != 1 || m.at(1, 0) != 0 || m.at(1, 1) != 2 || m.total() != 4) {
      failures.push_back("2x2 counts");
    }
    const auto r = metrics::precision_recall_f(m, metrics::Averaging::macro);
    near(r.per_class[0].precision, 1.0, 1e-12, "pA");
    near(r.per_class[0].recall, 0.5, 1e-12, "rA");
    near(r.per_class[0].f1, 2.0 / 3.0, 1e-12, "fA");
    near(r.per_class[1].precision, 2.0 / 3.0, 1e-12, "pB");
    near(r.per_class[1].recall, 1.0, 1e-12, "rB");
    near(r.per_class[1].f1, 0.8, 1e-12, "fB");
    near(r.f1, (2.0 / 3.0 + 0.8) / 2.0, 1e-12, "macro f");
  }
  {
    // Rows x [3,1,0], y [1,2,1], other [0,1,1].
    const text::ClassMap cm({"x", "y"}, {4, 4});
    std::vector<std::size_t> gold, pred;
    const std::size_t cells[3][3] = {{3, 1, 0}, {1, 2, 1}, {0, 1, 1}};
    for (std::size_t g = 0; g < 3; ++g) {
      for (std::size_t p = 0; p < 3; ++p) {
        for (std::size_t n = 0; n < cells[g][p]; ++n) {
          gold.push_back(g);
          pred.push_back(p);
        }
      }
    }
    const auto m = metrics::confusion(gold, pred, cm);
    for (std::size_t g = 0; g < 3; ++g) {
      for (std::size_t p = 0; p < 3; ++p) {
        if (m.at(g, p) != cells[g][p]) failures.push_back("3x3 cell");
      }
    }
    near(metrics::precision_recall_f(m, metrics::Averaging::macro).f1, (0.75 + 0.5 + 0.5) / 3.0, 1e-12, "macro");
    near(metrics::precision_recall_f(m, metrics::Averaging::weighted).f1, 0.6, 1e-12, "weighted");
    near(metrics::precision_recall_f(m, metrics::Averaging::macro, false).f1, 0.625, 1e-12, "macro-no-other");
    const auto recall = metrics::per_word_recall(m);
    if (recall.size() != 3 || recall[0].stem != "x" || recall[1].stem != "y" || recall[2].stem != "other") {
      failures.push_back("recall order");
    } else {
      near(recall[0].recall, 0.75, 1e-12, "recall x");
      near(recall[1].recall, 0.5, 1e-12, "recall y");
      near(recall[2].recall, 0.5, 1e-12, "recall other");
    }
  }
  const std::vector<metrics::Tokens> cand{{"the", "cat"}}, ref{{"the", "cat", "sat"}};
  const double bp = metrics::bleu(cand, ref, 2);
  near(bp, std::exp(1.0 - 3.0 / 2.0), 1e-6, "bleu brevity");
  const std::vector<metrics::Tokens> corpus{{"gets", "the", "current", "value"}, {"sets", "a", "flag"}};
  const double id = metrics::bleu(corpus, corpus);
  near(id, 1.0, 1e-12, "bleu identity");
  return {failures.empty(), "brevity example " + num(bp, 10) + ", identity " + num(id, 6) +
                                (failures.empty() ? "" : "; failed: " + join(failures, ", "))};
}

Outcome partitioned_bleu() {
  const auto start = Clock::now();
  synth::TemplateSpec spec;
  spec.name_noise = 0.3;
  const auto records = synth::generate(spec, 1000, 11, 10);
  const auto e = testing::make_experiment(records, {0.7, 0.1, 0.2}, 10, text::Setting::top10);

  model::TrainConfig tc;
  tc.objective = model::Objective::summary;
  tc.epochs_max = 60;
  tc.batch_size = 8;
  tc.learning_rate = 1.0;
  tc.seed = 2;
  const auto vocabs = model::build_vocabs(e.train, tc.input.mode, 5000);
  const auto result = model::train(e.train, e.val, vocabs, tc, e.lexicon, e.class_map);
  const model::Model m{result.params, vocabs, tc.input};

  std::vector<metrics::Tokens> refs, preds;
  std::vector<std::optional<metrics::Tokens>> forced;
  for (const auto& r : e.test) {
    refs.push_back(r.summary_tokens);
    preds.push_back(model::predict_summary(m, r));
    forced.emplace_back();
    const auto aw = text::extract_action_word(r.summary_tokens, e.lexicon);
    if (aw && !metrics::action_word_correct(r.summary_tokens, preds.back(), e.lexicon)) {
      forced.back() = model::force_action_word(m, r, aw->surface);
    }
  }
  const auto report = metrics::aw_partitioned_bleu(refs, preds, forced, e.lexicon);
  const auto show = [](const std::optional<double>& v) { return v ? num(*v) : std::string("absent"); };
  const bool pass = report.bleu_aw_correct && report.bleu_aw_incorrect && report.bleu_aw_forced &&
                    *report.bleu_aw_correct > *report.bleu_aw_incorrect &&
                    *report.bleu_aw_forced > *report.bleu_aw_incorrect;
  return {pass, "correct " + show(report.bleu_aw_correct) + " (" + std::to_string(report.aw_correct) +
                    "), incorrect " + show(report.bleu_aw_incorrect) + " (" + std::to_string(report.aw_incorrect) +
                    "), forced " + show(report.bleu_aw_forced) + ", " + num(seconds_since(start), 1) + " s"};
}

/// Runs synth -> build -> train -> eval inside `dir` with relative paths.
void golden_pipeline(const std::filesystem::path& dir) {
  const auto previous = std::filesystem::current_path();
  std::filesystem::current_path(dir);
  std::ostringstream log;
  try {
    using pipeline::Config;
    pipeline::cmd_synth(Config::resolve({{"n", "200"}, {"seed", "42"}, {"out", "corpus.jsonl"}}, {}), log);
    pipeline::cmd_build(Config::resolve({{"corpus", "corpus.jsonl"}, {"out", "build"}, {"k", "10"}}, {}), log);
    pipeline::cmd_train(
        Config::resolve({{"build", "build"}, {"out", "run"}, {"setting", "top10"}, {"epochs", "4"}}, {}), log);
    pipeline::cmd_eval(pipeline::resolve_for("eval", {{"run", "run"}, {"out", "eval"}}, {}), log);
  } catch (...) {
    std::filesystem::current_path(previous);
    throw;
  }
  std::filesystem::current_path(previous);
}

Outcome determinism() {
  const auto a = testing::scratch_dir("golden-a");
  const auto b = testing::scratch_dir("golden-b");
  golden_pipeline(a);
  golden_pipeline(b);
  std::size_t same = 0;
  std::string differing;
  const std::vector<std::string> files{"eval/report.txt", "eval/report.jsonl", "eval/confusion.tsv",
                                       "eval/recall.tsv", "eval/predictions.tsv", "run/model.awpm",
                                       "run/train_log.tsv"};
  for (const auto& f : files) {
    const auto x = testing::slurp(a / f), y = testing::slurp(b / f);
    if (!x.empty() && x == y) {
      ++same;
    } else {
      differing += " " + f;
    }
  }
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
  return {same == files.size(), std::to_string(same) + "/" + std::to_string(files.size()) +
                                    " artifacts byte-identical" + (differing.empty() ? "" : ";" + differing)};
}

Outcome anonymization_audit() {
  const auto records = corpus::load_corpus(testing::data_dir() / "fixture_corpus.jsonl");
  model::InputConfig input;
  input.mode = model::Mode::challenge;
  std::size_t leaked = 0, fed = 0, placeholders = 0, text_leaves = 0;
  for (const auto& r : records) {
    const auto leaves = ast::text_leaves(*r.ast);
    const std::set<std::string> originals(leaves.begin(), leaves.end());
    text_leaves += leaves.size();
    const auto in = model::model_inputs(r, input);
    for (const auto* stream : {&in.code, &in.ast}) {
      for (const auto& token : *stream) {
        ++fed;
        leaked += originals.count(token);
        placeholders += token == ast::kIdentifierPlaceholder || token == ast::kLiteralPlaceholder;
      }
    }
  }
  // Each stream carries one placeholder per identifier or literal leaf.
  return {leaked == 0 && fed > 0 && placeholders == 2 * text_leaves,
          std::to_string(leaked) + " identifier tokens reached the model out of " + std::to_string(fed) + " fed over " +
              std::to_string(records.size()) + " records; " + std::to_string(placeholders) + " placeholders for " +
              std::to_string(text_leaves) + " leaves per stream pair"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "porter stemmer vs reference oracle", porter_oracle},
      {2, "tokenizer golden pair", tokenizer_golden},
      {3, "action-word extraction fixture", extraction_fixture},
      {4, "gradient check", gradient_check},
      {5, "overfit diagnostic", overfit},
      {6, "get/set diagnostic", getset_diagnostic},
      {7, "metric oracles", metric_oracles},
      {8, "action-word partitioned BLEU direction", partitioned_bleu},
      {9, "end-to-end determinism", determinism},
      {10, "challenge anonymization audit", anonymization_audit},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "AC" << c.id << (c.id < 10 ? "  " : " ") << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": "
              << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
