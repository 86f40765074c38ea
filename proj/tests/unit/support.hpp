#pragma once

#include <string>
#include <vector>

#include "boxtrace/program.hpp"
#include "boxtrace/trace.hpp"

namespace boxtrace::testing {

// The four-clause example: one failed attempt at eq(a,b), then success
// through p(b).
inline constexpr const char* kByrdExample =
    "goal :- p(X), eq(X, b).\n"
    "p(a).\n"
    "p(b).\n"
    "eq(X, X).\n"
    ":- goal.\n";

inline Program byrd_example() { return parse_program(kByrdExample); }

inline Term term(const char* text) { return parse_term(text, VariableSyntax::trace); }

inline std::vector<std::string> lines_of(const std::vector<TraceEvent>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) {
    out.push_back(render_event(e));
  }
  return out;
}

}  // namespace boxtrace::testing
