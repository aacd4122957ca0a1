// SPDX-License-Identifier: Apache-2.0
#include "awp/vocab.hpp"

#include <algorithm>
#include <map>

#include "awp/ast.hpp"
#include "awp/error.hpp"
#include "awp/util.hpp"

namespace awp::model {

Vocabulary::Vocabulary() {
  for (const char* s : {"<pad>", "<s>", "</s>", "<unk>"}) add(s);
}

void Vocabulary::add(std::string token) {
  ids_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> sequences,
                             std::size_t max_size) {
  if (max_size < kNumSpecials + 1) throw UsageError("vocabulary max_size must be at least 5");
  Vocabulary v;
  std::map<std::string, std::size_t> freq;
  for (const auto& seq : sequences) {
    for (const auto& t : seq) {
      if (!v.ids_.contains(t)) ++freq[t];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  for (auto& [token, count] : ranked) {
    if (v.size() >= max_size) break;
    v.add(token);
  }
  return v;
}

int Vocabulary::id(std::string_view token) const {
  const auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw DataError("token id " + std::to_string(id) + " out of vocabulary range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::string Vocabulary::to_text() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::from_text(std::string_view text) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  Vocabulary v;
  if (lines.size() < kNumSpecials) throw DataError("vocabulary file: missing special tokens");
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    if (lines[i] != v.tokens_[i]) throw DataError("vocabulary file: bad special token at line " + std::to_string(i + 1));
  }
  for (std::size_t i = kNumSpecials; i < lines.size(); ++i) {
    if (lines[i].empty() || v.ids_.contains(lines[i])) {
      throw DataError("vocabulary file line " + std::to_string(i + 1) + ": empty or duplicate token");
    }
    v.add(lines[i]);
  }
  return v;
}

std::uint64_t Vocabulary::content_hash() const { return fnv1a(to_text()); }

std::vector<std::string> field_tokens(const corpus::FunctionRecord& record, VocabField field) {
  switch (field) {
    case VocabField::code: return record.code_tokens;
    case VocabField::summary: return record.summary_tokens;
    case VocabField::ast:
      if (!record.ast) throw DataError("record '" + record.id + "' has no AST");
      return ast::flatten_ast(*record.ast);
    case VocabField::challenge:
      if (!record.ast) throw DataError("record '" + record.id + "' has no AST");
      return ast::flatten_ast(ast::challenge_transform(*record.ast));
  }
  return {};
}

Vocabulary build_vocab(std::span<const corpus::FunctionRecord> train_records, VocabField field,
                       std::size_t max_size) {
  std::vector<std::vector<std::string>> seqs;
  seqs.reserve(train_records.size());
  for (const auto& r : train_records) seqs.push_back(field_tokens(r, field));
  return Vocabulary::build(seqs, max_size);
}

}  // namespace awp::model
