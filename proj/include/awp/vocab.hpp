// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "awp/record.hpp"

namespace awp::model {

inline constexpr int kPad = 0;
inline constexpr int kStart = 1;
inline constexpr int kEnd = 2;
inline constexpr int kUnk = 3;
inline constexpr std::size_t kNumSpecials = 4;

/// Token <-> id table with PAD/START/END/UNK reserved at ids 0..3.
class Vocabulary {
 public:
  Vocabulary();

  /// Most frequent tokens first (ties lexicographic), capped at max_size
  /// entries including the specials. Throws UsageError if max_size < 5.
  static Vocabulary build(std::span<const std::vector<std::string>> sequences,
                          std::size_t max_size);

  std::size_t size() const { return tokens_.size(); }

  /// Id of `token`, or kUnk.
  int id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(int id) const;

  std::vector<int> encode(std::span<const std::string> tokens) const;

  /// One token per line in id order.
  std::string to_text() const;
  static Vocabulary from_text(std::string_view text);

  std::uint64_t content_hash() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

/// Which token stream of a record a vocabulary covers.
enum class VocabField {
  code,       // code_tokens
  ast,        // flattened AST
  summary,    // summary_tokens
  challenge,  // flattened anonymized AST
};

std::vector<std::string> field_tokens(const corpus::FunctionRecord& record, VocabField field);

Vocabulary build_vocab(std::span<const corpus::FunctionRecord> train_records, VocabField field,
                       std::size_t max_size);

}  // namespace awp::model
