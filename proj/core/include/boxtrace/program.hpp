#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "boxtrace/substitution.hpp"
#include "boxtrace/term.hpp"

namespace boxtrace {

struct Clause {
  Term head;
  std::vector<Term> body;
  // Position in the program, 0-based.
  std::size_t source_index = 0;

  bool is_fact() const noexcept { return body.empty(); }

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Program {
  std::vector<Clause> clauses;
  Term goal = Term::atom("true");

  friend bool operator==(const Program&, const Program&) = default;
};

// How variable tokens are read.
enum class VariableSyntax {
  // Program text: every variable has index 0. Names ending in `_<digits>`
  // are rejected because that suffix denotes renamed variables. Each `_`
  // is a distinct anonymous variable.
  source,
  // Trace text: `Name_k` with k >= 1 reads back as variable (Name, k).
  trace,
};

// Parses a complete program: clauses in source order plus exactly one
// `:- goal.` directive. Throws ParseError.
Program parse_program(std::string_view text);

// Parses a single term (no trailing period). Throws ParseError.
Term parse_term(std::string_view text, VariableSyntax syntax = VariableSyntax::source);

std::string render_clause(const Clause& c);
// Output reparses to an equal Program.
std::string render_program(const Program& p);

// Index reserved for the throwaway renaming used when filtering clauses.
inline constexpr std::uint32_t kScratchIndex = std::numeric_limits<std::uint32_t>::max();

// Gives every variable of `c` the fresh index `counter`.
Clause rename_apart(const Clause& c, std::uint32_t counter);

// Positions of the clauses whose renamed-apart head unifies with
// apply_subst(p, s), in program order. The trial bindings are discarded.
std::vector<std::size_t> useful_clauses(const Term& p, const Program& prog, const Substitution& s);

}  // namespace boxtrace
