// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "awp/ast.hpp"

namespace awp::corpus {

enum class Language { java, c_cpp, synthetic };

std::string_view to_string(Language lang);
Language parse_language(std::string_view name);

/// One function/summary pair.
struct FunctionRecord {
  std::string id;
  std::string project_id;
  Language language = Language::java;
  std::vector<std::string> code_tokens;
  std::optional<ast::AstNode> ast;
  std::vector<std::string> summary_tokens;
  std::optional<std::string> raw_code;

  bool operator==(const FunctionRecord&) const = default;
};

}  // namespace awp::corpus

namespace awp::ast {

/// Record with code_tokens replaced by the flat anonymized AST; the summary
/// is kept. Throws DataError when the record has no AST.
corpus::FunctionRecord challenge_strip_code(const corpus::FunctionRecord& record);

}  // namespace awp::ast
