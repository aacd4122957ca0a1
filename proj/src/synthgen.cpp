// SPDX-License-Identifier: Apache-2.0
#include "awp/synthgen.hpp"

#include <algorithm>
#include <map>

#include "awp/ast.hpp"
#include "awp/error.hpp"
#include "awp/textproc.hpp"
#include "awp/util.hpp"

namespace awp::synth {
namespace {

enum class Shape { accessor, mutator, appender, remover, resetter, factory, predicate, reader };

struct ClassInfo {
  Shape shape;
  std::string_view prefix;   // method-name verb
  std::string_view surface;  // summary verb
  std::string_view marker;   // word that follows the verb in every summary
};

const std::map<std::string, ClassInfo, std::less<>>& class_table() {
  static const std::map<std::string, ClassInfo, std::less<>> table{
      {"get", {Shape::accessor, "get", "gets", "current"}},
      {"return", {Shape::accessor, "return", "returns", "held"}},
      {"set", {Shape::mutator, "set", "sets", "new"}},
      {"add", {Shape::appender, "add", "adds", "extra"}},
      {"remove", {Shape::remover, "remove", "removes", "old"}},
      {"initialize", {Shape::resetter, "initialize", "initializes", "default"}},
      {"create", {Shape::factory, "create", "creates", "fresh"}},
      {"check", {Shape::predicate, "check", "checks", "whether"}},
      {"is", {Shape::predicate, "is", "is", "true"}},
      {"read", {Shape::reader, "read", "reads", "next"}},
  };
  return table;
}

std::string capitalize(std::string_view s) {
  std::string out(s);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& pool) {
  return pool[rng.below(pool.size())];
}

struct Target {
  std::string code;
  std::string ast;
};

}  // namespace

const std::vector<std::string>& known_classes() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, info] : class_table()) out.push_back(name);
    return out;
  }();
  return names;
}

std::vector<corpus::FunctionRecord> generate(const TemplateSpec& spec, std::size_t n,
                                             std::uint64_t seed, std::size_t projects) {
  if (n < 1) throw UsageError("synth: n must be at least 1");
  if (projects < 3) throw UsageError("synth: at least 3 projects are required");
  if (spec.classes.empty()) throw UsageError("synth: no classes");
  if (spec.identifier_pool.empty() || spec.owner_pool.empty()) throw UsageError("synth: empty pool");
  for (const auto& c : spec.classes) {
    if (!class_table().contains(c)) throw UsageError("synth: unknown class '" + c + "'");
  }

  // Balanced class assignment, shuffled once for the whole corpus.
  std::vector<std::size_t> assignment(n);
  for (std::size_t i = 0; i < n; ++i) assignment[i] = i % spec.classes.size();
  Rng order_rng(mix_seed(seed, 0xc1a55));
  order_rng.shuffle(assignment.begin(), assignment.end());

  static const std::vector<std::string> value_types{"int", "long", "String", "boolean", "double"};
  static const std::vector<std::string> comparisons{"eq", "ne", "gt", "lt"};
  static const std::map<std::string, std::string> comparison_ops{
      {"eq", "=="}, {"ne", "!="}, {"gt", ">"}, {"lt", "<"}};

  std::vector<corpus::FunctionRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, i + 1));
    const std::string& cls = spec.classes[assignment[i]];
    const ClassInfo& info = class_table().find(cls)->second;

    const std::string noun = pick(rng, spec.identifier_pool);
    const std::string owner = pick(rng, spec.owner_pool);
    const std::string type = pick(rng, value_types);
    const bool noisy = rng.bernoulli(spec.name_noise);
    const std::string name = noisy ? noun : std::string(info.prefix) + capitalize(noun);

    // Where the touched value lives: owner field, this field or a local.
    Target target;
    const auto where = rng.below(3);
    const bool owned = where == 0;
    if (owned) {
      target = {owner + "." + noun, "(field (var id:" + owner + ") id:" + noun + ")"};
    } else if (where == 1) {
      target = {"this." + noun, "(field this id:" + noun + ")"};
    } else {
      target = {noun, "(var id:" + noun + ")"};
    }
    const std::string param = rng.bernoulli(0.5) ? std::string("value") : noun;

    std::string code;
    std::string body;
    std::string ret_type;
    std::string params_ast = "params";
    switch (info.shape) {
      case Shape::accessor:
        ret_type = type;
        code = type + " " + name + "() {\n  return " + target.code + ";\n}";
        body = "(return " + target.ast + ")";
        break;
      case Shape::mutator:
        ret_type = "void";
        code = "void " + name + "(" + type + " " + param + ") {\n  " + target.code + " = " + param + ";\n}";
        params_ast = "(params (param (type " + type + ") (name id:" + param + ")))";
        body = "(assign " + target.ast + " (var id:" + param + "))";
        break;
      case Shape::appender:
        ret_type = "void";
        code = "void " + name + "(" + capitalize(noun) + " " + param + ") {\n  " + target.code +
               "s.add(" + param + ");\n}";
        params_ast = "(params (param (type id:" + noun + ") (name id:" + param + ")))";
        body = "(call " + target.ast + " (name id:add) (args (var id:" + param + ")))";
        break;
      case Shape::remover:
        ret_type = "boolean";
        code = "boolean " + name + "(" + capitalize(noun) + " " + param + ") {\n  return " +
               target.code + "s.remove(" + param + ");\n}";
        params_ast = "(params (param (type id:" + noun + ") (name id:" + param + ")))";
        body = "(return (call " + target.ast + " (name id:remove) (args (var id:" + param + "))))";
        break;
      case Shape::resetter: {
        const std::string lit = type == "String" ? "null" : type == "boolean" ? "false" : "0";
        ret_type = "void";
        code = "void " + name + "() {\n  " + target.code + " = " + lit + ";\n}";
        body = "(assign " + target.ast + " lit:" + lit + ")";
        break;
      }
      case Shape::factory:
        ret_type = capitalize(noun);
        code = capitalize(noun) + " " + name + "() {\n  return new " + capitalize(noun) + "();\n}";
        body = "(return (new (type id:" + noun + ") args))";
        break;
      case Shape::predicate: {
        const std::string& cmp = pick(rng, comparisons);
        const std::string lit = rng.bernoulli(0.5) ? "0" : "null";
        ret_type = "boolean";
        code = "boolean " + name + "() {\n  return " + target.code + " " + comparison_ops.at(cmp) + " " +
               lit + ";\n}";
        body = "(return (" + cmp + " " + target.ast + " lit:" + lit + "))";
        break;
      }
      case Shape::reader:
        ret_type = type;
        code = type + " " + name + "(Reader " + param + ") {\n  return " + param + ".read();\n}";
        params_ast = "(params (param (type id:reader) (name id:" + param + ")))";
        body = "(return (call (var id:" + param + ") (name id:read) args))";
        break;
    }
    code = "public " + code;

    std::string type_ast = ret_type == "void" || ret_type == "int" || ret_type == "long" ||
                                   ret_type == "boolean" || ret_type == "double"
                               ? "(type " + ret_type + ")"
                               : "(type id:" + ret_type + ")";
    const std::string ast_text = "(method public " + type_ast + " (name id:" + name + ") " + params_ast +
                                 " (body " + body + "))";

    std::vector<std::string> summary;
    // "is" loses its action-word status behind a subject, so it keeps the bare form.
    if (cls != "is" && rng.bernoulli(spec.subject_form)) {
      summary = {"this", "method"};
    }
    summary.emplace_back(info.surface);
    summary.emplace_back(info.marker);
    summary.push_back(noun);
    if (owned) {
      summary.emplace_back("of");
      summary.push_back(owner);
    }

    corpus::FunctionRecord r;
    r.id = "syn" + std::to_string(seed) + "-" + std::to_string(i);
    r.project_id = "synproj" + std::to_string(i % projects);
    r.language = corpus::Language::synthetic;
    r.code_tokens = text::tokenize_code(code);
    r.ast = ast::parse_sexpr(ast_text);
    r.summary_tokens = std::move(summary);
    r.raw_code = std::move(code);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace awp::synth
