// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "awp/network.hpp"

namespace awp::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  Dims dims;
  InputConfig input;
  std::uint64_t seed = 0;
  std::uint64_t code_vocab_hash = 0;
  std::uint64_t ast_vocab_hash = 0;
  std::uint64_t summary_vocab_hash = 0;
  std::uint64_t class_map_hash = 0;
  /// Free-form provenance (resolved config, corpus hash).
  std::string provenance;

  bool operator==(const CheckpointHeader&) const = default;
};

struct Checkpoint {
  CheckpointHeader header;
  ModelParams params;
};

/// Binary layout: "AWPM", u32 version, header, u32 array count, then per
/// array: u32 name length, name, u32 rank, u64 dims, little-endian f64 data.
/// Throws NumericError if any parameter is non-finite.
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_params(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_params(const std::filesystem::path& path);

/// Loads and checks the vocabulary and class-map hashes against `vocabs`.
Checkpoint load_params(const std::filesystem::path& path, const VocabSet& vocabs,
                       std::uint64_t class_map_hash);

std::uint64_t class_map_hash(const text::ClassMap& class_map);

}  // namespace awp::model
