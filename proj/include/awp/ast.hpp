// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace awp::ast {

enum class NodeKind { structure, identifier, literal };

/// One node of a syntax tree. Identifier and literal nodes are always leaves.
struct AstNode {
  std::string label;
  NodeKind kind = NodeKind::structure;
  std::vector<AstNode> children;

  bool is_leaf() const { return children.empty(); }

  bool operator==(const AstNode&) const = default;
};

inline constexpr std::string_view kIdentifierPlaceholder = "ID";
inline constexpr std::string_view kLiteralPlaceholder = "LIT";

/// Parses the s-expression form
///   node := atom | "(" label node* ")"
///   atom := [id:|lit:]?[a-z0-9_]+
/// Input is lowercased before matching. Throws ParseError with the byte offset.
AstNode parse_sexpr(std::string_view text);

/// Canonical single-spaced rendering; childless nodes render as bare atoms.
std::string serialize_sexpr(const AstNode& root);

/// Parenthesized pre-order token stream: "(" label children... ")" for
/// internal nodes, the bare label for leaves.
std::vector<std::string> flatten_ast(const AstNode& root);

/// Same shape with every identifier label replaced by "ID" and every
/// literal label by "LIT".
AstNode challenge_transform(const AstNode& root);

std::size_t node_count(const AstNode& root);
std::size_t internal_count(const AstNode& root);

/// Labels of all identifier and literal leaves, in pre-order.
std::vector<std::string> text_leaves(const AstNode& root);

}  // namespace awp::ast
