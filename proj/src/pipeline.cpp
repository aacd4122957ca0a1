// SPDX-License-Identifier: Apache-2.0
#include "awp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "awp/ast.hpp"
#include "awp/checkpoint.hpp"
#include "awp/corpus.hpp"
#include "awp/error.hpp"
#include "awp/metrics.hpp"
#include "awp/network.hpp"
#include "awp/synthgen.hpp"
#include "awp/textproc.hpp"
#include "awp/train.hpp"
#include "awp/util.hpp"
#include "awp/vocab.hpp"

namespace awp::pipeline {
namespace fs = std::filesystem;
using corpus::FunctionRecord;

namespace {

constexpr KeySpec kKeys[] = {
    {"allow_attendgru_challenge", "false", "run attendgru in the challenge condition (results are flagged)"},
    {"batch", "16", "mini-batch size"},
    {"bleu_percent", "false", "render BLEU x100 in the text report"},
    {"build", "", "build directory (output of build, input of train/eval/attn)"},
    {"classes", "get,set,return,add,remove,initialize,check,is,read,create", "synthetic action classes"},
    {"clip", "5", "global gradient-norm clip; 0 disables"},
    {"condition", "standard", "standard | challenge"},
    {"corpus", "", "JSON-lines corpus"},
    {"embed", "32", "embedding width"},
    {"epochs", "10", "maximum training epochs"},
    {"hidden", "64", "GRU hidden width"},
    {"id", "", "record id for attn"},
    {"include_other", "auto", "average p/r/f over 'other': true | false | auto (false for getset)"},
    {"jobs", "1", "worker threads for evaluation"},
    {"k", "40", "class map size (clamped to the distinct action words)"},
    {"lexicon", "", "verb list file; empty = built-in list"},
    {"lr", "0.5", "learning rate"},
    {"max_ast_len", "100", "AST tokens fed to the encoder"},
    {"max_code", "100", "quality filter: max code tokens"},
    {"max_code_len", "100", "code tokens fed to the encoder"},
    {"max_summary", "13", "quality filter: max summary tokens"},
    {"max_summary_len", "13", "decoder length"},
    {"min_summary", "3", "quality filter: min summary tokens"},
    {"n", "200", "synthetic records"},
    {"name_noise", "0", "synthetic: probability a method name drops its verb"},
    {"objective", "summary", "summary | action_word"},
    {"out", "", "output file (synth, stats) or directory"},
    {"projects", "10", "synthetic projects"},
    {"ratios", "0.8,0.1,0.1", "train,val,test fractions"},
    {"run", "", "run directory (output of train)"},
    {"seed", "42", "seed for synthesis and model initialization"},
    {"setting", "top40", "top40 | top10 | top10n | getset"},
    {"split_seed", "1", "seed of the project split"},
    {"stop_loss", "0", "stop once mean epoch training loss falls below this; 0 = never"},
    {"subject_form", "0.1", "synthetic: share of 'this method <verb>' summaries"},
    {"variant", "ast-attendgru", "attendgru | ast-attendgru"},
    {"vocab_size", "5000", "vocabulary cap including the four specials"},
    {"wallclock", "0", "training time cap in seconds; 0 = none"},
};

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : kKeys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

double parse_double(std::string_view key, std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("config: " + std::string(key) + " expects a number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw UsageError("config: " + std::string(key) + " expects a non-negative integer, got '" +
                     std::string(s) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw UsageError("config: " + std::string(key) + " expects true or false, got '" + std::string(s) + "'");
}

corpus::SplitRatios parse_ratios(std::string_view s) {
  const auto parts = split(s, ',');
  if (parts.size() != 3) throw UsageError("config: ratios expects three comma-separated fractions");
  corpus::SplitRatios r{parse_double("ratios", parts[0]), parse_double("ratios", parts[1]),
                        parse_double("ratios", parts[2])};
  if (r.train <= 0 || r.val <= 0 || r.test <= 0) throw UsageError("config: ratios must be positive");
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9) throw UsageError("config: ratios must sum to 1");
  return r;
}

void validate(const Config& c) {
  for (auto key : {"batch", "embed", "epochs", "hidden", "jobs", "k", "max_summary", "min_summary", "n",
                   "projects", "vocab_size"}) {
    if (c.count(key) < 1) throw UsageError(std::string("config: ") + key + " must be at least 1");
  }
  for (auto key : {"max_ast_len", "max_code", "max_code_len", "max_summary_len", "seed", "split_seed"}) {
    c.u64(key);
  }
  for (auto key : {"clip", "lr", "stop_loss", "wallclock"}) {
    if (c.number(key) < 0) throw UsageError(std::string("config: ") + key + " must be non-negative");
  }
  for (auto key : {"name_noise", "subject_form"}) {
    const double p = c.number(key);
    if (p < 0 || p > 1) throw UsageError(std::string("config: ") + key + " must lie in [0, 1]");
  }
  if (c.count("min_summary") > c.count("max_summary")) {
    throw UsageError("config: min_summary exceeds max_summary");
  }
  if (c.count("vocab_size") < 5) throw UsageError("config: vocab_size must be at least 5");
  c.flag("allow_attendgru_challenge");
  c.flag("bleu_percent");
  const auto& other = c.get("include_other");
  if (other != "auto") c.flag("include_other");
  parse_ratios(c.get("ratios"));
  model::parse_mode(c.get("condition"));
  model::parse_variant(c.get("variant"));
  model::parse_objective(c.get("objective"));
  text::parse_setting(c.get("setting"));
  for (const auto& cls : split(c.get("classes"), ',')) {
    const auto& known = synth::known_classes();
    if (std::find(known.begin(), known.end(), cls) == known.end()) {
      throw UsageError("config: unknown synthetic class '" + cls + "'");
    }
  }
}

// ---------------------------------------------------------------------------

const std::string& require(const Config& c, std::string_view key) {
  const auto& v = c.get(key);
  if (v.empty()) throw UsageError("missing required option --" + std::string(key));
  return v;
}

text::VerbLexicon lexicon_of(const Config& c) {
  const auto& path = c.get("lexicon");
  return path.empty() ? text::VerbLexicon::builtin() : text::VerbLexicon::load(path);
}

model::InputConfig input_of(const Config& c) {
  model::InputConfig in;
  in.variant = model::parse_variant(c.get("variant"));
  in.mode = model::parse_mode(c.get("condition"));
  in.max_code_len = c.u64("max_code_len");
  in.max_ast_len = c.u64("max_ast_len");
  in.max_summary_len = c.u64("max_summary_len");
  return in;
}

bool flagged_attendgru(const Config& c) {
  const auto in = input_of(c);
  if (in.mode != model::Mode::challenge || in.variant != model::Variant::attendgru) return false;
  if (!c.flag("allow_attendgru_challenge")) {
    throw UsageError("attendgru is excluded from the challenge condition; pass "
                     "--allow_attendgru_challenge true to run it anyway");
  }
  return true;
}

std::string provenance(const Config& c, std::string_view corpus_hash) {
  std::string out = "# corpus_hash=" + std::string(corpus_hash) + "\n";
  for (const auto& [k, v] : c.values()) out += "# " + k + "=" + v + "\n";
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory " + dir.string() + ": " + ec.message());
}

struct BuildData {
  std::vector<FunctionRecord> records;
  corpus::DatasetSplit split;
  text::ClassMap class_map;
  model::Vocabulary code, ast, summary, challenge;
  std::string corpus_hash;
};

constexpr std::string_view kVocabFiles[] = {"vocab.code.txt", "vocab.ast.txt", "vocab.summary.txt",
                                            "vocab.challenge.txt"};

BuildData load_build(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("build directory not found: " + dir.string());
  BuildData b;
  b.records = corpus::load_corpus(dir / "corpus.jsonl");
  b.split = corpus::DatasetSplit::from_text(read_file(dir / "split.txt"));
  b.class_map = text::ClassMap::from_tsv(read_file(dir / "classmap.tsv"));
  b.code = model::Vocabulary::from_text(read_file(dir / kVocabFiles[0]));
  b.ast = model::Vocabulary::from_text(read_file(dir / kVocabFiles[1]));
  b.summary = model::Vocabulary::from_text(read_file(dir / kVocabFiles[2]));
  b.challenge = model::Vocabulary::from_text(read_file(dir / kVocabFiles[3]));
  b.corpus_hash = hex64(corpus::content_hash(b.records));
  return b;
}

model::VocabSet vocabs_for(const BuildData& b, model::Mode mode) {
  if (mode == model::Mode::challenge) return {b.challenge, b.challenge, b.summary};
  return {b.code, b.ast, b.summary};
}

/// Records of one split, re-targeted to the configured setting.
text::SettingView view_of(const BuildData& b, std::span<const std::string> ids, const Config& c,
                          const text::VerbLexicon& lexicon) {
  const auto records = corpus::select(b.records, ids);
  return text::derive_setting_view(records, b.class_map, text::parse_setting(c.get("setting")), lexicon);
}

/// Runs f(i) for i in [0, n) on `jobs` threads; results must go to slot i.
template <class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& f) {
  if (jobs <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < std::min(jobs, n); ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

struct LoadedModel {
  BuildData build;
  model::Model model;
  text::VerbLexicon lexicon;
  text::ClassMap class_map;
  bool flagged = false;
};

LoadedModel load_model(const Config& c) {
  const fs::path run = require(c, "run");
  LoadedModel m;
  m.flagged = flagged_attendgru(c);
  m.build = load_build(require(c, "build"));
  m.lexicon = lexicon_of(c);
  m.class_map = text::derive_setting_view({}, m.build.class_map, text::parse_setting(c.get("setting")),
                                          m.lexicon)
                    .class_map;
  const auto input = input_of(c);
  auto vocabs = vocabs_for(m.build, input.mode);
  auto checkpoint = model::load_params(run / "model.awpm", vocabs, model::class_map_hash(m.class_map));
  if (!(checkpoint.header.input == input)) {
    throw UsageError("configuration disagrees with the checkpoint's recorded inputs");
  }
  m.model = model::Model{std::move(checkpoint.params), std::move(vocabs), input};
  return m;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string join_tokens(const std::vector<std::string>& tokens) { return join(tokens, " "); }

}  // namespace

// ---------------------------------------------------------------------------

std::span<const KeySpec> config_keys() { return kKeys; }

KeyValues parse_key_values(std::string_view text, std::string_view origin) {
  KeyValues out;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!find_key(key)) {
      throw UsageError(std::string(origin) + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

Config Config::resolve(const KeyValues& flags, const std::optional<fs::path>& file, const KeyValues& base) {
  Config c;
  for (const auto& k : kKeys) c.values_[std::string(k.name)] = std::string(k.default_value);
  for (const auto& [k, v] : base) {
    if (!find_key(k)) throw UsageError("unknown key '" + k + "'");
    c.values_[k] = v;
  }
  if (file) {
    if (!fs::exists(*file)) throw UsageError("config file not found: " + file->string());
    for (const auto& [k, v] : parse_key_values(read_file(*file), file->string())) c.values_[k] = v;
  }
  for (const auto& [k, v] : flags) {
    if (!find_key(k)) throw UsageError("unknown option '" + k + "'");
    c.values_[k] = v;
  }
  validate(c);
  return c;
}

const std::string& Config::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  return it->second;
}

double Config::number(std::string_view key) const { return parse_double(key, get(key)); }
std::size_t Config::count(std::string_view key) const { return static_cast<std::size_t>(u64(key)); }
std::uint64_t Config::u64(std::string_view key) const { return parse_u64(key, get(key)); }
bool Config::flag(std::string_view key) const { return parse_bool(key, get(key)); }

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

Config resolve_for(std::string_view command, const KeyValues& flags, const std::optional<fs::path>& file) {
  if (command != "eval" && command != "attn") return Config::resolve(flags, file);
  // The run directory is located first; its recorded settings become the base layer.
  const Config probe = Config::resolve(flags, file);
  const fs::path run = require(probe, "run");
  const fs::path recorded = run / "config.txt";
  if (!fs::exists(recorded)) throw DataError("run configuration not found: " + recorded.string());
  KeyValues base = parse_key_values(read_file(recorded), recorded.string());
  base.erase("out");
  base.erase("run");
  return Config::resolve(flags, file, base);
}

// ---------------------------------------------------------------------------

void cmd_synth(const Config& c, std::ostream& log) {
  const fs::path out = require(c, "out");
  synth::TemplateSpec spec;
  spec.classes = split(c.get("classes"), ',');
  spec.name_noise = c.number("name_noise");
  spec.subject_form = c.number("subject_form");
  const auto records = synth::generate(spec, c.count("n"), c.u64("seed"), c.count("projects"));
  const auto hash = hex64(corpus::content_hash(records));
  corpus::save_corpus(out, records);
  write_file_atomic(fs::path(out.string() + ".config"), provenance(c, hash));
  log << "wrote " << records.size() << " records to " << out.string() << " (hash " << hash << ")\n";
}

void cmd_build(const Config& c, std::ostream& log) {
  const fs::path in = require(c, "corpus");
  const fs::path dir = require(c, "out");
  const auto lexicon = lexicon_of(c);

  const auto loaded = corpus::load_corpus(in);
  const auto generated = corpus::filter_generated(loaded, corpus::default_generated_markers());
  const corpus::QualityLimits limits{c.count("min_summary"), c.count("max_summary"), c.count("max_code")};
  const auto records = corpus::filter_quality(generated, limits);
  if (records.empty()) throw DataError("build: no records survive filtering");

  const auto split = corpus::split_by_project(records, parse_ratios(c.get("ratios")), c.u64("split_seed"));
  const auto train = corpus::select(records, split.train_ids);

  std::vector<std::string> stems;
  for (const auto& r : train) {
    if (const auto aw = text::extract_action_word(r.summary_tokens, lexicon)) stems.push_back(aw->stem);
  }
  std::vector<std::string> distinct = stems;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const std::size_t k = std::min(c.count("k"), distinct.size());
  const auto top = text::build_class_map(stems, k);
  const text::ClassMap class_map(top.stems(), top.counts(), train.size());

  const std::size_t vocab_size = c.count("vocab_size");
  const model::VocabField fields[] = {model::VocabField::code, model::VocabField::ast,
                                      model::VocabField::summary, model::VocabField::challenge};

  ensure_dir(dir);
  const auto hash = hex64(corpus::content_hash(records));
  corpus::save_corpus(dir / "corpus.jsonl", records);
  write_file_atomic(dir / "split.txt", split.to_text());
  write_file_atomic(dir / "classmap.tsv", class_map.to_tsv());
  for (std::size_t i = 0; i < 4; ++i) {
    write_file_atomic(dir / kVocabFiles[i], model::build_vocab(train, fields[i], vocab_size).to_text());
  }

  std::string manifest = provenance(c, hash);
  manifest += "records_loaded=" + std::to_string(loaded.size()) + "\n";
  manifest += "records_kept=" + std::to_string(records.size()) + "\n";
  manifest += "split=" + std::to_string(split.train_ids.size()) + "," + std::to_string(split.val_ids.size()) +
              "," + std::to_string(split.test_ids.size()) + "\n";
  manifest += "k=" + std::to_string(k) + "\n";
  manifest += "coverage=" + fixed(class_map.coverage(), 6) + "\n";
  write_file_atomic(dir / "build.txt", manifest);

  log << "kept " << records.size() << " of " << loaded.size() << " records\n";
  log << "split train/val/test: " << split.train_ids.size() << "/" << split.val_ids.size() << "/"
      << split.test_ids.size() << "\n";
  if (k < c.count("k")) log << "k clamped to " << k << " distinct action words\n";
  log << "top-" << k << " action words cover " << fixed(100.0 * class_map.coverage(), 2)
      << "% of the training set\n";
}

void cmd_stats(const Config& c, std::ostream& log) {
  const auto records = corpus::load_corpus(require(c, "corpus"));
  const auto lexicon = lexicon_of(c);
  const auto s = corpus::corpus_stats(records, lexicon, c.count("k"));
  std::string out = provenance(c, hex64(corpus::content_hash(records)));
  out += "records\t" + std::to_string(s.total) + "\n";
  out += "with_action_word\t" + fixed(s.action_word_fraction(), 6) + "\n";
  out += "position_1\t" + fixed(s.position_fraction(1), 6) + "\n";
  out += "position_2\t" + fixed(s.position_fraction(2), 6) + "\n";
  out += "position_3\t" + fixed(s.position_fraction(3), 6) + "\n";
  out += "position_none\t" + fixed(s.position_fraction(0), 6) + "\n";
  out += "only_verb\t" + fixed(s.only_verb_fraction(), 6) + "\n";
  out += "word\tcount\n";
  for (const auto& [stem, n] : s.top_stems) out += stem + "\t" + std::to_string(n) + "\n";
  if (!c.get("out").empty()) write_file_atomic(c.get("out"), out);
  log << out;
}

void cmd_train(const Config& c, std::ostream& log) {
  const fs::path run = require(c, "out");
  const bool flagged = flagged_attendgru(c);
  const auto build = load_build(require(c, "build"));
  const auto lexicon = lexicon_of(c);
  const auto train_view = view_of(build, build.split.train_ids, c, lexicon);
  const auto val_view = view_of(build, build.split.val_ids, c, lexicon);

  model::TrainConfig tc;
  tc.epochs_max = c.count("epochs");
  tc.wallclock_max_seconds = c.number("wallclock");
  tc.batch_size = c.count("batch");
  tc.learning_rate = c.number("lr");
  tc.clip_norm = c.number("clip");
  tc.embed_dim = static_cast<int>(c.count("embed"));
  tc.hidden_dim = static_cast<int>(c.count("hidden"));
  tc.input = input_of(c);
  tc.seed = c.u64("seed");
  tc.objective = model::parse_objective(c.get("objective"));
  tc.stop_loss = c.number("stop_loss");

  const auto vocabs = vocabs_for(build, tc.input.mode);
  const auto result = model::train(train_view.records, val_view.records, vocabs, tc, lexicon,
                                   train_view.class_map);

  const std::string prov = provenance(c, build.corpus_hash);
  model::Checkpoint checkpoint;
  checkpoint.header.dims = result.params.dims;
  checkpoint.header.input = tc.input;
  checkpoint.header.seed = tc.seed;
  checkpoint.header.code_vocab_hash = vocabs.code.content_hash();
  checkpoint.header.ast_vocab_hash = vocabs.ast.content_hash();
  checkpoint.header.summary_vocab_hash = vocabs.summary.content_hash();
  checkpoint.header.class_map_hash = model::class_map_hash(train_view.class_map);
  checkpoint.header.provenance = prov;
  checkpoint.params = result.params;

  ensure_dir(run);
  model::save_params(run / "model.awpm", checkpoint);
  write_file_atomic(run / "train_log.tsv", prov + result.log_tsv());
  write_file_atomic(run / "config.txt", "# corpus_hash=" + build.corpus_hash + "\n" + c.to_text());

  log << "trained on " << train_view.records.size() << " records, validated on " << val_view.records.size()
      << "\n";
  for (const auto& e : result.log) {
    log << "epoch " << e.epoch << "  loss " << fixed(e.train_loss) << "  val_loss " << fixed(e.val_loss)
        << "  val_acc " << fixed(e.val_accuracy) << "\n";
  }
  log << "selected epoch " << result.best_epoch << (result.stopped_by_wallclock ? " (wallclock cap)" : "")
      << (flagged ? " [attendgru in challenge condition: flagged]" : "") << "\n";
}

void cmd_eval(const Config& c, std::ostream& log) {
  const fs::path dir = require(c, "out");
  const auto m = load_model(c);
  const auto view = view_of(m.build, m.build.split.test_ids, c, m.lexicon);
  if (view.records.empty()) throw DataError("eval: no test records in this setting");
  const auto& records = view.records;
  const bool summary_objective = m.model.params.dims.objective == model::Objective::summary;

  const std::size_t n = records.size();
  std::vector<std::size_t> gold(n), pred(n);
  std::vector<metrics::Tokens> refs(n), preds(n);
  std::vector<std::optional<metrics::Tokens>> forced(n);
  parallel_for(n, c.count("jobs"), [&](std::size_t i) {
    const auto& r = records[i];
    gold[i] = text::label_record(r, m.lexicon, m.class_map);
    refs[i] = r.summary_tokens;
    if (!summary_objective) {
      pred[i] = model::classify_action_word(m.model, r, m.class_map, m.lexicon).label;
      return;
    }
    preds[i] = model::predict_summary(m.model, r);
    pred[i] = text::label_summary(preds[i], m.lexicon, m.class_map);
    const auto ref_aw = text::extract_action_word(r.summary_tokens, m.lexicon);
    if (ref_aw && !metrics::action_word_correct(r.summary_tokens, preds[i], m.lexicon)) {
      forced[i] = model::force_action_word(m.model, r, ref_aw->surface);
    }
  });

  const auto matrix = metrics::confusion(gold, pred, m.class_map);
  const auto setting = text::parse_setting(c.get("setting"));
  const bool include_other = c.get("include_other") == "auto" ? setting != text::Setting::getset
                                                              : c.flag("include_other");
  const auto macro = metrics::precision_recall_f(matrix, metrics::Averaging::macro, include_other);
  const auto weighted = metrics::precision_recall_f(matrix, metrics::Averaging::weighted, include_other);
  const auto recall = metrics::per_word_recall(matrix);
  std::optional<metrics::PartitionedBleuReport> bleu;
  if (summary_objective) bleu = metrics::aw_partitioned_bleu(refs, preds, forced, m.lexicon);

  const std::string prov = provenance(c, m.build.corpus_hash);
  const double scale = c.flag("bleu_percent") ? 100.0 : 1.0;
  const auto show = [&](const std::optional<double>& v) { return v ? fixed(*v * scale) : std::string("n/a"); };

  std::string text = prov;
  text += "setting     " + c.get("setting") + "\n";
  text += "condition   " + c.get("condition") + "\n";
  text += "variant     " + c.get("variant") + (m.flagged ? " (flagged: not applicable to challenge)" : "") + "\n";
  text += "objective   " + c.get("objective") + "\n";
  text += "records     " + std::to_string(n) + "\n";
  text += "other       " + std::string(include_other ? "included in averages" : "excluded from averages") + "\n";
  text += "\n            p       r       f\n";
  text += "macro       " + fixed(macro.precision) + "  " + fixed(macro.recall) + "  " + fixed(macro.f1) +
          "   (headline)\n";
  text += "weighted    " + fixed(weighted.precision) + "  " + fixed(weighted.recall) + "  " +
          fixed(weighted.f1) + "\n";
  text += "\nclass       support p       r       f\n";
  for (const auto& s : macro.per_class) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-11s %7zu %s  %s  %s\n", s.name.c_str(), s.support,
                  fixed(s.precision).c_str(), fixed(s.recall).c_str(), fixed(s.f1).c_str());
    text += buf;
  }
  if (bleu) {
    text += "\nbleu        " + std::string(metrics::kBleuVariant) + (scale == 1.0 ? "" : " (x100)") + "\n";
    text += "default     " + show(bleu->bleu_default) + "\n";
    text += "aw_correct  " + show(bleu->bleu_aw_correct) + "  (" + std::to_string(bleu->aw_correct) + ")\n";
    text += "aw_incorr   " + show(bleu->bleu_aw_incorrect) + "  (" + std::to_string(bleu->aw_incorrect) + ")\n";
    text += "aw_forced   " + show(bleu->bleu_aw_forced) + "\n";
    text += "excluded    " + std::to_string(bleu->excluded) + "\n";
  }

  using nlohmann::ordered_json;
  ordered_json j;
  j["setting"] = c.get("setting");
  j["condition"] = c.get("condition");
  j["variant"] = c.get("variant");
  j["objective"] = c.get("objective");
  j["flagged"] = m.flagged;
  j["records"] = n;
  j["includes_other"] = include_other;
  const auto scores = [](const metrics::EvaluationReport& r) {
    return ordered_json{{"p", r.precision}, {"r", r.recall}, {"f", r.f1}};
  };
  j["macro"] = scores(macro);
  j["weighted"] = scores(weighted);
  j["headline"] = "macro";
  ordered_json per_class = ordered_json::array();
  for (const auto& s : macro.per_class) {
    per_class.push_back({{"class", s.name}, {"support", s.support}, {"p", s.precision}, {"r", s.recall},
                         {"f", s.f1}});
  }
  j["per_class"] = per_class;
  if (bleu) {
    const auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
    j["bleu"] = {{"variant", metrics::kBleuVariant},
                 {"default", opt(bleu->bleu_default)},
                 {"aw_correct", opt(bleu->bleu_aw_correct)},
                 {"aw_incorrect", opt(bleu->bleu_aw_incorrect)},
                 {"aw_forced", opt(bleu->bleu_aw_forced)},
                 {"evaluated", bleu->evaluated},
                 {"n_aw_correct", bleu->aw_correct},
                 {"n_aw_incorrect", bleu->aw_incorrect},
                 {"excluded", bleu->excluded}};
  } else {
    j["bleu"] = nullptr;
  }
  j["corpus_hash"] = m.build.corpus_hash;
  j["config"] = c.values();

  std::string recall_tsv = prov + "word\tgold_count\trecall\n";
  for (const auto& w : recall) recall_tsv += w.stem + "\t" + std::to_string(w.gold_count) + "\t" + fixed(w.recall, 6) + "\n";

  std::string predictions = prov + "id\tgold\tpredicted\tsummary\tforced\n";
  for (std::size_t i = 0; i < n; ++i) {
    predictions += records[i].id + "\t" + m.class_map.name(gold[i]) + "\t" + m.class_map.name(pred[i]) + "\t" +
                   join_tokens(preds[i]) + "\t" + (forced[i] ? join_tokens(*forced[i]) : std::string()) + "\n";
  }

  ensure_dir(dir);
  write_file_atomic(dir / "report.txt", text);
  write_file_atomic(dir / "report.jsonl", j.dump() + "\n");
  write_file_atomic(dir / "confusion.tsv", prov + matrix.to_tsv());
  write_file_atomic(dir / "recall.tsv", recall_tsv);
  write_file_atomic(dir / "predictions.tsv", predictions);
  log << text;
}

void cmd_attn(const Config& c, std::ostream& log) {
  const fs::path dir = require(c, "out");
  const auto& id = require(c, "id");
  const auto m = load_model(c);
  if (m.model.params.dims.objective != model::Objective::summary) {
    throw UsageError("attn needs a model trained with the summary objective");
  }
  const auto it = std::find_if(m.build.records.begin(), m.build.records.end(),
                               [&](const FunctionRecord& r) { return r.id == id; });
  if (it == m.build.records.end()) throw DataError("record id not found: " + id);

  const std::string prov = provenance(c, m.build.corpus_hash);
  ensure_dir(dir);
  const auto unforced = model::dump_attention(m.model, *it);
  write_file_atomic(dir / ("attn." + id + ".unforced.tsv"), prov + unforced.to_tsv());
  log << "unforced: " << join_tokens(unforced.row_labels) << "\n";
  if (const auto aw = text::extract_action_word(it->summary_tokens, m.lexicon)) {
    const auto forced = model::dump_attention(m.model, *it, aw->surface);
    write_file_atomic(dir / ("attn." + id + ".forced.tsv"), prov + forced.to_tsv());
    log << "forced:   " << join_tokens(forced.row_labels) << "\n";
  } else {
    log << "reference has no action word; forced dump skipped\n";
  }
}

int exit_code(const std::exception& error) {
  if (dynamic_cast<const UsageError*>(&error)) return 1;
  if (dynamic_cast<const NumericError*>(&error)) return 3;
  return 2;
}

}  // namespace awp::pipeline
