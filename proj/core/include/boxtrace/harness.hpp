#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "boxtrace/engine.hpp"
#include "boxtrace/program.hpp"
#include "boxtrace/term.hpp"
#include "boxtrace/trace.hpp"

namespace boxtrace {

// ---------------------------------------------------------------------------
// Reference interpreter

struct ReferenceCaps {
  // Longest chain of nested resolutions.
  std::size_t max_depth = 4000;
  // Clause resolutions attempted, successful or not.
  std::size_t max_steps = 100000;
};

struct ReferenceResult {
  // Instantiated goals in discovery order.
  std::vector<Term> answers;
  // A cap was reached; `answers` is then only a prefix.
  bool cap_exceeded = false;
};

// Plain recursive SLD search: leftmost goal, clauses in program order.
// Shares nothing with the engine beyond terms and unification.
ReferenceResult reference_solve(const Program& prog, const ReferenceCaps& caps = {});

// Answers as a sorted list of canonical texts, variables renamed by
// alpha_normalize. Equal lists mean equal multisets modulo renaming.
std::vector<std::string> answer_multiset(const std::vector<Term>& answers);

// ---------------------------------------------------------------------------
// Program generator

struct GenParams {
  std::uint64_t seed = 0;
  std::size_t predicate_count = 4;
  std::size_t max_clauses = 3;
  std::size_t max_body = 3;
  std::size_t max_term_depth = 2;
  std::size_t constant_pool = 3;
  // Chance that a body goal may call a predicate that is not below its
  // own in the numbering. Zero yields an acyclic call graph.
  double recursion_probability = 0.0;
};

// Throws PreconditionError when a bound is zero or the probability is
// outside [0, 1].
void validate(const GenParams& gp);

// Deterministic in gp. Predicates are p0..p<k-1>; the goal calls p0.
Program gen_program(const GenParams& gp);

// Parameters for suite program `seed`: sizes and recursion vary with the
// seed so that one sweep covers small, wide, deep and recursive programs.
GenParams suite_params(std::uint64_t seed);

// ---------------------------------------------------------------------------
// Faithfulness checking

enum class Verdict { pass, fail, limit_hit };
std::string_view to_string(Verdict v);

enum class AnswerCheck {
  // The comparison was not requested or the run did not finish.
  not_run,
  // The reference search hit a cap.
  skipped,
  match,
  mismatch,
};
std::string_view to_string(AnswerCheck a);

struct Divergence {
  // Event being interpreted; 0 for the initial states.
  std::uint64_t chrono = 0;
  // Engine state restricted to {T, u, num, pred}, rendered as a tree.
  std::string expected_state;
  std::string rebuilt_state;
  std::optional<RuleId> expected_rule;
  std::optional<RuleId> classified_rule;
  std::string detail;
};

struct FaithfulnessReport {
  // FNV-1a of the rendered program, hex.
  std::string program_digest;
  std::size_t steps_checked = 0;
  std::optional<Divergence> divergence;
  Verdict verdict = Verdict::pass;
  RunStatus run_status = RunStatus::terminal;
  // Set when select_rule found several applicable guards.
  bool determinism_violation = false;
  AnswerCheck answers = AnswerCheck::not_run;
  std::vector<Term> engine_answers;
  std::vector<Term> reference_answers;
  // The rules applied by the engine, one per checked step.
  std::vector<RuleId> rules;
};

struct CheckLimits {
  RunLimits run;
  ReferenceCaps reference;
  bool compare_answers = true;
  // Recheck engine invariants after every step (slow).
  bool check_engine_invariants = false;
};

// Runs the engine, extracts each event and interprets it with one event of
// lookahead, comparing the rebuilt state and rule with the engine's at
// every step. Never throws for program behaviour; problems are reported.
FaithfulnessReport check_faithfulness(const Program& prog, const CheckLimits& limits = {});

// Same comparison against a supplied event stream instead of the extracted
// one, for negative controls on corrupted traces.
FaithfulnessReport check_trace(const Program& prog, const std::vector<TraceEvent>& events,
                               const CheckLimits& limits = {});

std::string program_digest(const Program& prog);

// First line is "<verdict>, <n> steps"; details follow on later lines.
std::string render_report(const FaithfulnessReport& r);
std::string report_to_json(const FaithfulnessReport& r);

// ---------------------------------------------------------------------------
// Suites

struct SuiteSummary {
  std::size_t programs = 0;
  std::size_t passed = 0;
  std::size_t limit_hit = 0;
  std::size_t failed = 0;
  std::size_t steps = 0;
  std::size_t determinism_violations = 0;
  std::size_t answers_compared = 0;
  std::size_t answer_mismatches = 0;
  std::size_t answers_skipped = 0;
  // Seeds whose report was not a pass or limit hit, or whose answers differ.
  std::vector<std::uint64_t> failing_seeds;
};

// Checks suite_params(s) programs for s in [first_seed, first_seed + count),
// spreading seeds over `threads` workers (0 picks the hardware count).
SuiteSummary run_suite(std::uint64_t first_seed, std::size_t count, const CheckLimits& limits,
                       unsigned threads = 1);

}  // namespace boxtrace
