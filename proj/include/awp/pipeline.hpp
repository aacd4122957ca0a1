// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

namespace awp::pipeline {

struct KeySpec {
  std::string_view name;
  std::string_view default_value;
  std::string_view help;
};

/// Every configuration key with its default.
std::span<const KeySpec> config_keys();

using KeyValues = std::map<std::string, std::string, std::less<>>;

/// Flat "key=value" lines; '#' starts a comment line. Unknown keys are a
/// UsageError naming `origin`.
KeyValues parse_key_values(std::string_view text, std::string_view origin);

/// Resolved experiment configuration (flag > file > base > default).
class Config {
 public:
  /// `base` carries settings inherited from an earlier stage (a run
  /// directory). Values are validated before returning.
  static Config resolve(const KeyValues& flags, const std::optional<std::filesystem::path>& file,
                        const KeyValues& base = {});

  const std::string& get(std::string_view key) const;
  double number(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  std::uint64_t u64(std::string_view key) const;
  bool flag(std::string_view key) const;

  const KeyValues& values() const { return values_; }

  /// All keys, sorted, one "key=value" per line.
  std::string to_text() const;

 private:
  KeyValues values_;
};

/// Resolves the configuration for a subcommand. eval and attn inherit the
/// model settings recorded in the run directory.
Config resolve_for(std::string_view command, const KeyValues& flags,
                   const std::optional<std::filesystem::path>& file);

void cmd_synth(const Config& config, std::ostream& log);
void cmd_build(const Config& config, std::ostream& log);
void cmd_stats(const Config& config, std::ostream& log);
void cmd_train(const Config& config, std::ostream& log);
void cmd_eval(const Config& config, std::ostream& log);
void cmd_attn(const Config& config, std::ostream& log);

/// 1 usage, 2 data, 3 numeric.
int exit_code(const std::exception& error);

}  // namespace awp::pipeline
