// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. The throughput line is advisory.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "boxtrace/harness.hpp"
#include "boxtrace/rebuild.hpp"
#include "boxtrace/trace.hpp"

namespace {

using namespace boxtrace;
using Clock = std::chrono::steady_clock;

constexpr const char* kByrdExample =
    "goal :- p(X), eq(X, b).\n"
    "p(a).\n"
    "p(b).\n"
    "eq(X, X).\n"
    ":- goal.\n";

constexpr std::uint64_t kSuiteFirstSeed = 1;
constexpr std::size_t kSuiteSize = 500;
constexpr std::size_t kSuiteStepCap = 10000;

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!ok) {
    ++failures;
  }
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f s", s);
  return buf;
}

void golden_trace() {
  const std::vector<std::string> expected = {
      "1 1 1 Call goal",    "2 2 2 Call p(X)", "3 2 2 Exit p(a)",     "4 3 2 Call eq(a,b)",
      "5 3 2 Fail eq(a,b)", "6 2 2 Redo p(a)", "7 2 2 Exit p(b)",     "8 4 2 Call eq(b,b)",
      "9 4 2 Exit eq(b,b)", "10 1 1 Exit goal"};
  const auto t0 = Clock::now();
  const ExtractedTrace t = extract_trace(parse_program(kByrdExample));
  const double elapsed = seconds_since(t0);
  bool ok = t.status == RunStatus::terminal && t.events.size() == expected.size();
  std::string detail;
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    if (!alpha_equivalent(t.events[i], parse_event(expected[i]))) {
      ok = false;
      detail = "event " + std::to_string(i + 1) + " is '" + render_event(t.events[i]) + "'; ";
    }
  }
  ok = ok && elapsed < 1.0;
  report("golden-trace", ok,
         detail + std::to_string(t.events.size()) + " events in " + fmt_seconds(elapsed));
}

void suite_criteria() {
  CheckLimits limits;
  limits.run.max_steps = kSuiteStepCap;
  const auto t0 = Clock::now();
  const SuiteSummary s = run_suite(kSuiteFirstSeed, kSuiteSize, limits, 0);
  const double elapsed = seconds_since(t0);

  std::string seeds;
  for (auto seed : s.failing_seeds) {
    seeds += " " + std::to_string(seed);
  }
  report("faithfulness-suite", s.failed == 0 && s.programs == kSuiteSize && elapsed < 60.0,
         std::to_string(s.programs) + " programs, " + std::to_string(s.passed) + " pass, " +
             std::to_string(s.limit_hit) + " limit-hit, " + std::to_string(s.failed) +
             " fail, " + std::to_string(s.steps) + " steps in " + fmt_seconds(elapsed) +
             (seeds.empty() ? "" : "; failing seeds" + seeds));
  report("oracle-equivalence", s.answer_mismatches == 0 && s.answers_compared > 0,
         std::to_string(s.answers_compared) + " compared, " +
             std::to_string(s.answer_mismatches) + " mismatched, " +
             std::to_string(s.answers_skipped) + " skipped (reference cap)");
  report("determinism", s.determinism_violations == 0,
         std::to_string(s.determinism_violations) + " violations over " +
             std::to_string(s.steps) + " steps");
}

bool same_rebuild(const RebuildResult& a, const RebuildResult& b) {
  if (a.ok() != b.ok() || a.steps.size() != b.steps.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].first != b.steps[i].first || !(a.steps[i].second == b.steps[i].second)) {
      return false;
    }
  }
  return true;
}

void redundancy() {
  std::vector<Program> programs{parse_program(kByrdExample)};
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    programs.push_back(gen_program(suite_params(seed)));
  }
  std::mt19937_64 rng(2024);
  std::size_t traces = 0, depth_unchanged = 0, lint_caught = 0;
  std::size_t port_mutants = 0, port_caught = 0, node_mutants = 0, node_caught = 0;
  for (const Program& prog : programs) {
    const ExtractedTrace t = extract_trace(prog, RunLimits{.max_steps = 2000});
    if (t.status != RunStatus::terminal || t.events.empty()) {
      continue;
    }
    ++traces;
    const RestrictedState q0 = initial_state_from(t.events);
    auto shifted = t.events;
    for (auto& e : shifted) {
      e.depth += 1 + rng() % 3;
    }
    depth_unchanged += same_rebuild(rebuild(q0, t.events), rebuild(q0, shifted)) ? 1 : 0;
    lint_caught += first_depth_mismatch(q0, shifted).has_value() ? 1 : 0;

    // A few single-event mutants per trace.
    for (int k = 0; k < 3; ++k) {
      const std::size_t i = rng() % t.events.size();
      auto bad = t.events;
      bad[i].port = static_cast<Port>((static_cast<int>(bad[i].port) + 1 + rng() % 3) % 4);
      ++port_mutants;
      port_caught += check_trace(prog, bad).verdict == Verdict::fail ? 1 : 0;

      bad = t.events;
      bad[i].node += 1 + rng() % 3;
      ++node_mutants;
      node_caught += check_trace(prog, bad).verdict == Verdict::fail ? 1 : 0;
    }
  }
  const bool ok = traces > 0 && depth_unchanged == traces && lint_caught == traces &&
                  port_caught == port_mutants && node_caught == node_mutants;
  report("redundancy", ok,
         std::to_string(traces) + " traces: depth corruption left " +
             std::to_string(depth_unchanged) + " rebuilds unchanged, lint caught " +
             std::to_string(lint_caught) + "; port mutants caught " +
             std::to_string(port_caught) + "/" + std::to_string(port_mutants) +
             ", node mutants caught " + std::to_string(node_caught) + "/" +
             std::to_string(node_mutants));
}

void degenerate_cases() {
  auto lines = [](const char* text) {
    std::vector<std::string> out;
    for (const auto& e : extract_trace(parse_program(text)).events) {
      out.push_back(render_event(e));
    }
    return out;
  };
  const auto no_match = lines("p(a).\n:- g.");
  const auto single = lines("a.\n:- a.");
  const auto two = lines("p(a). p(b).\n:- p(X).");
  const bool ok =
      no_match == std::vector<std::string>{"1 1 1 Call g", "2 1 1 Fail g"} &&
      single == std::vector<std::string>{"1 1 1 Call a", "2 1 1 Exit a"} &&
      two == std::vector<std::string>{"1 1 1 Call p(X)", "2 1 1 Exit p(a)", "3 1 1 Redo p(a)",
                                      "4 1 1 Exit p(b)"};
  report("degenerate-cases", ok,
         std::to_string(no_match.size()) + "/" + std::to_string(single.size()) + "/" +
             std::to_string(two.size()) + " events");
}

// Two shapes: a wide backtracking search over small ground terms and an
// ever deeper chain of calls. Both keep terms small.
void throughput() {
  const char* shapes[] = {
      "d(a). d(b). d(c). d(e). d(f). d(g). d(h).\n"
      "loop :- d(X), d(Y), d(Z), d(U), d(V), d(W), never(X, W).\n"
      ":- loop.",
      "p :- p.\n:- p.",
  };
  double worst = 0;
  std::string detail;
  for (const char* text : shapes) {
    const Program prog = parse_program(text);
    RunOptions opt;
    opt.limits.max_steps = 200000;
    const auto t0 = Clock::now();
    const RunResult r = run(prog, opt);
    const double elapsed = seconds_since(t0);
    const double rate = static_cast<double>(r.trace.steps.size()) / elapsed;
    worst = worst == 0 ? rate : std::min(worst, rate);
    detail += (detail.empty() ? "" : ", ") + std::to_string(r.trace.steps.size()) +
              " steps in " + fmt_seconds(elapsed);
  }
  std::cout << "ADVISORY throughput: " << detail << "; slowest "
            << static_cast<long long>(worst) << " steps/s (target 100000)" << std::endl;
}

}  // namespace

int main() {
  golden_trace();
  suite_criteria();
  redundancy();
  degenerate_cases();
  throughput();
  return failures == 0 ? 0 : 1;
}
