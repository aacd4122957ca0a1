// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <string>

#include "awp/error.hpp"
#include "awp/textproc.hpp"
#include "awp/util.hpp"

namespace awp::text {
namespace {

// Common programming verbs in base form. Words that are far more often
// nouns in summaries (count, index, name, state, record, ...) are left out
// because lookup goes through Porter stems.
constexpr std::string_view kBuiltinVerbs[] = {
    // the forty most frequent first words of Java method summaries
    "return", "set", "get", "add", "create", "initialize", "test", "remove", "check", "is",
    "call", "retrieve", "update", "automate", "write", "determine", "read", "handle", "to", "if",
    "insert", "describe", "use", "load", "delete", "convert", "start", "clear", "print", "find",
    "reset", "save", "send", "generate", "close", "compare", "indicate", "perform", "change",
    "show",
    // further verbs
    "accept", "access", "activate", "adjust", "allocate", "allow", "analyze", "animate", "append",
    "apply", "assert", "assign", "attach", "bind", "broadcast", "browse", "build", "cache",
    "calculate", "cancel", "capture", "clean", "clone", "collect", "combine", "commit",
    "compile", "complete", "compress", "compute", "configure", "confirm", "connect", "construct",
    "consume", "contain", "copy", "deactivate", "decode", "decrement", "decrypt", "define",
    "delegate", "deliver", "deregister", "deserialize", "destroy", "detect", "disable",
    "dispatch", "display", "dispose", "divide", "download", "draw", "drop", "dump", "edit",
    "emit", "enable", "encode", "encrypt", "enqueue", "ensure", "enter", "erase", "escape",
    "evaluate", "execute", "exit", "expand", "export", "extract", "fetch", "fill", "filter",
    "finalize", "finish", "fire", "flip", "flush", "format", "forward", "gather", "give",
    "grant", "hide", "ignore", "import", "increment", "init", "inject", "inspect", "install",
    "instantiate", "interpret", "invalidate", "invoke", "iterate", "join", "keep", "kill",
    "launch", "listen", "locate", "lock", "look", "lookup", "make", "manage", "mark", "match",
    "maximize", "measure", "merge", "minimize", "modify", "mount", "move", "multiply",
    "navigate", "negate", "normalize", "notify", "obtain", "open", "override", "pack", "paint",
    "parse", "pass", "patch", "pause", "peek", "pick", "play", "poll", "pop", "populate", "post",
    "prepare", "process", "produce", "provide", "publish", "pull", "push", "put", "query",
    "quit", "raise", "rebuild", "receive", "recover", "redirect", "reduce", "refresh",
    "register", "reject", "release", "reload", "remember", "rename", "render", "repaint",
    "repeat", "replace", "represent", "request", "require", "reserve", "resize", "resolve",
    "respond", "restart", "restore", "resume", "retry", "reverse", "revert", "rollback",
    "rotate", "run", "scan", "schedule", "scroll", "search", "seek", "select", "serialize",
    "setup", "shift", "shutdown", "simulate", "skip", "sleep", "solve", "sort", "spawn",
    "specify", "split", "stop", "store", "strip", "submit", "subscribe", "subtract", "supply",
    "support", "suspend", "swap", "switch", "sync", "take", "terminate", "throw", "toggle",
    "track", "transfer", "transform", "translate", "transmit", "traverse", "trigger", "trim",
    "truncate", "try", "unlock", "unpack", "unregister", "unset", "unsubscribe", "unwrap",
    "upgrade", "upload", "validate", "verify", "visit", "wait", "wake", "walk", "warn", "watch",
    "wrap", "yield",
};

bool all_letters(std::string_view token) {
  return !token.empty() &&
         std::all_of(token.begin(), token.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

}  // namespace

bool is_exception_word(std::string_view token) {
  return std::find(std::begin(kExceptionWords), std::end(kExceptionWords), token) !=
         std::end(kExceptionWords);
}

std::vector<std::vector<std::string>> VerbLexicon::default_subjects() {
  return {{"this", "method"}, {"this", "function"}, {"it"}};
}

VerbLexicon::VerbLexicon(std::vector<std::string> verbs,
                         std::vector<std::vector<std::string>> simple_subjects)
    : subjects_(std::move(simple_subjects)) {
  for (auto& v : verbs) add(v);
  // Longest subject first so "this method" wins over a shorter prefix.
  std::stable_sort(subjects_.begin(), subjects_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

VerbLexicon VerbLexicon::builtin() {
  std::vector<std::string> verbs(std::begin(kBuiltinVerbs), std::end(kBuiltinVerbs));
  return VerbLexicon(std::move(verbs));
}

VerbLexicon VerbLexicon::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<std::string> verbs;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!all_letters(line)) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) +
                      ": verb must be lowercase letters");
    }
    verbs.emplace_back(line);
  }
  return VerbLexicon(std::move(verbs));
}

void VerbLexicon::add(std::string_view verb) {
  if (!all_letters(verb)) throw DataError("lexicon entry '" + std::string(verb) + "' is not lowercase letters");
  verbs_.emplace(verb);
  if (!is_exception_word(verb)) stems_.insert(porter_stem(verb));
}

bool VerbLexicon::is_verb(std::string_view token) const {
  if (!all_letters(token) || is_exception_word(token)) return false;
  return stems_.contains(porter_stem(token));
}

}  // namespace awp::text
