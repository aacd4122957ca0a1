// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "awp/record.hpp"

namespace awp::synth {

/// Generator knobs. Each action class maps onto a code shape:
///   get, return      accessor   - return of a field, no parameters
///   set              mutator    - parameter assigned to a field, void
///   add              appender   - parameter passed to a collection call
///   remove           remover    - parameter, returns a collection call
///   initialize       resetter   - literal assigned to a field, void
///   create           factory    - returns a new object
///   check, is        predicate  - returns a comparison
///   read             reader     - stream parameter, returns a read call
/// get/return and check/is share a shape and differ only through the method
/// name, so name noise makes them genuinely ambiguous.
struct TemplateSpec {
  std::vector<std::string> classes{"get",        "set",    "return", "add",  "remove",
                                   "initialize", "check", "is",     "read", "create"};
  std::vector<std::string> identifier_pool{
      "count", "title", "value",   "size",  "speaker", "customer", "buffer", "index",
      "node",  "path",  "config",  "user",  "order",   "token",    "item",   "record",
      "state", "level", "message", "score", "width",   "height",   "color",  "label"};
  std::vector<std::string> owner_pool{"account", "session", "parser",  "widget",
                                      "channel", "player",  "invoice", "report"};
  /// Probability that the method name drops its verb ("count()" instead of
  /// "getCount()").
  double name_noise = 0.0;
  /// Probability of the "this method <verb> ..." summary form.
  double subject_form = 0.1;
};

/// Classes the generator knows.
const std::vector<std::string>& known_classes();

/// Deterministic corpus of n records over `projects` projects. Classes are
/// balanced within one record; ids are "syn<seed>-<index>". Throws
/// UsageError for n < 1, projects < 3 or an unknown class.
std::vector<corpus::FunctionRecord> generate(const TemplateSpec& spec, std::size_t n,
                                             std::uint64_t seed, std::size_t projects);

}  // namespace awp::synth
