// SPDX-License-Identifier: Apache-2.0
// awp: action-word prediction experiment pipeline.
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "awp/pipeline.hpp"

namespace {

using awp::pipeline::KeyValues;

struct Command {
  std::string_view name;
  std::string_view help;
  std::vector<std::string_view> keys;
  void (*run)(const awp::pipeline::Config&, std::ostream&);
};

const std::vector<std::string_view> kModelKeys{
    "build",       "setting", "condition",   "variant",      "objective",       "lexicon",
    "max_code_len", "max_ast_len", "max_summary_len", "allow_attendgru_challenge"};

std::vector<std::string_view> with_model_keys(std::vector<std::string_view> keys) {
  keys.insert(keys.end(), kModelKeys.begin(), kModelKeys.end());
  return keys;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Command> commands{
      {"synth", "generate a synthetic corpus",
       {"out", "n", "seed", "projects", "classes", "name_noise", "subject_form"},
       awp::pipeline::cmd_synth},
      {"build", "filter, split and index a corpus",
       {"corpus", "out", "ratios", "split_seed", "k", "vocab_size", "lexicon", "min_summary", "max_summary",
        "max_code"},
       awp::pipeline::cmd_build},
      {"stats", "action-word statistics of a corpus", {"corpus", "out", "lexicon", "k"}, awp::pipeline::cmd_stats},
      {"train", "train a model",
       with_model_keys({"out", "epochs", "wallclock", "batch", "lr", "clip", "embed", "hidden", "seed",
                        "stop_loss"}),
       awp::pipeline::cmd_train},
      {"eval", "evaluate a trained run on the test split",
       with_model_keys({"run", "out", "jobs", "include_other", "bleu_percent"}), awp::pipeline::cmd_eval},
      {"attn", "dump forced and unforced attention for one record", with_model_keys({"run", "out", "id"}),
       awp::pipeline::cmd_attn},
  };

  CLI::App app{"Action-word prediction for neural source code summarization"};
  app.require_subcommand(1);

  std::map<std::string, KeyValues> flags;
  std::map<std::string, std::string> config_files;
  std::map<std::string, std::string> storage;
  for (const auto& cmd : commands) {
    auto* sub = app.add_subcommand(std::string(cmd.name), std::string(cmd.help));
    sub->add_option("--config", config_files[std::string(cmd.name)], "flat key=value config file");
    for (const auto key : cmd.keys) {
      const awp::pipeline::KeySpec* spec = nullptr;
      for (const auto& k : awp::pipeline::config_keys()) {
        if (k.name == key) spec = &k;
      }
      const std::string name(key);
      const std::string help = std::string(spec->help) + " [default: " + std::string(spec->default_value) + "]";
      auto* opt = sub->add_option_function<std::string>(
          "--" + name, [&flags, cmd_name = std::string(cmd.name), name](const std::string& v) {
            flags[cmd_name][name] = v;
          },
          help);
      opt->type_name("VALUE");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  for (const auto& cmd : commands) {
    const std::string name(cmd.name);
    if (!app.got_subcommand(name)) continue;
    try {
      std::optional<std::filesystem::path> file;
      if (!config_files[name].empty()) file = config_files[name];
      const auto config = awp::pipeline::resolve_for(name, flags[name], file);
      cmd.run(config, std::cout);
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "awp " << name << ": " << e.what() << "\n";
      return awp::pipeline::exit_code(e);
    }
  }
  return 1;
}
