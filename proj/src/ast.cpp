// SPDX-License-Identifier: Apache-2.0
#include "awp/ast.hpp"

#include <cctype>

#include "awp/error.hpp"
#include "awp/record.hpp"

namespace awp::ast {
namespace {

bool is_atom_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {
    for (auto& c : text_) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }

  AstNode parse() {
    skip_space();
    AstNode root = node();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("trailing input", pos_);
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  AstNode node() {
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    if (text_[pos_] == ')') throw ParseError("unexpected ')'", pos_);
    if (text_[pos_] != '(') return atom();

    const std::size_t open = pos_++;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ')') throw ParseError("empty node", open);
    if (pos_ < text_.size() && text_[pos_] == '(') throw ParseError("node label expected", pos_);
    const std::size_t label_at = pos_;
    AstNode n = atom();
    if (n.kind != NodeKind::structure) {
      throw ParseError("identifier or literal cannot have children", label_at);
    }
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      n.children.push_back(node());
    }
    return n;
  }

  AstNode atom() {
    AstNode n;
    const std::string_view rest = std::string_view(text_).substr(pos_);
    if (rest.starts_with("id:")) {
      n.kind = NodeKind::identifier;
      pos_ += 3;
    } else if (rest.starts_with("lit:")) {
      n.kind = NodeKind::literal;
      pos_ += 4;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_atom_char(text_[pos_])) ++pos_;
    if (pos_ == start) {
      if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    if (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' &&
        text_[pos_] != ')') {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    n.label = text_.substr(start, pos_ - start);
    return n;
  }

  std::string text_;
  std::size_t pos_ = 0;
};

void serialize_into(const AstNode& n, std::string& out) {
  const auto atom = [&] {
    if (n.kind == NodeKind::identifier) out += "id:";
    if (n.kind == NodeKind::literal) out += "lit:";
    out += n.label;
  };
  if (n.is_leaf()) {
    atom();
    return;
  }
  out += '(';
  atom();
  for (const auto& c : n.children) {
    out += ' ';
    serialize_into(c, out);
  }
  out += ')';
}

void flatten_into(const AstNode& n, std::vector<std::string>& out) {
  if (n.is_leaf()) {
    out.push_back(n.label);
    return;
  }
  out.emplace_back("(");
  out.push_back(n.label);
  for (const auto& c : n.children) flatten_into(c, out);
  out.emplace_back(")");
}

void text_leaves_into(const AstNode& n, std::vector<std::string>& out) {
  if (n.kind != NodeKind::structure) out.push_back(n.label);
  for (const auto& c : n.children) text_leaves_into(c, out);
}

}  // namespace

AstNode parse_sexpr(std::string_view text) { return Parser(text).parse(); }

std::string serialize_sexpr(const AstNode& root) {
  std::string out;
  serialize_into(root, out);
  return out;
}

std::vector<std::string> flatten_ast(const AstNode& root) {
  std::vector<std::string> out;
  flatten_into(root, out);
  return out;
}

AstNode challenge_transform(const AstNode& root) {
  AstNode out;
  out.kind = root.kind;
  switch (root.kind) {
    case NodeKind::identifier: out.label = kIdentifierPlaceholder; break;
    case NodeKind::literal: out.label = kLiteralPlaceholder; break;
    case NodeKind::structure: out.label = root.label; break;
  }
  out.children.reserve(root.children.size());
  for (const auto& c : root.children) out.children.push_back(challenge_transform(c));
  return out;
}

std::size_t node_count(const AstNode& root) {
  std::size_t n = 1;
  for (const auto& c : root.children) n += node_count(c);
  return n;
}

std::size_t internal_count(const AstNode& root) {
  if (root.is_leaf()) return 0;
  std::size_t n = 1;
  for (const auto& c : root.children) n += internal_count(c);
  return n;
}

std::vector<std::string> text_leaves(const AstNode& root) {
  std::vector<std::string> out;
  text_leaves_into(root, out);
  return out;
}

corpus::FunctionRecord challenge_strip_code(const corpus::FunctionRecord& record) {
  if (!record.ast) throw DataError("record '" + record.id + "': challenge mode needs an AST");
  corpus::FunctionRecord out = record;
  out.code_tokens = flatten_ast(challenge_transform(*record.ast));
  return out;
}

}  // namespace awp::ast
