#include <benchmark/benchmark.h>

#include <vector>

#include "boxtrace/harness.hpp"
#include "boxtrace/rebuild.hpp"
#include "boxtrace/trace.hpp"

using namespace boxtrace;

namespace {

// Left recursion without term growth: every step deepens the tree.
const Program& chain_program() {
  static const Program p = parse_program("p :- p.\n:- p.");
  return p;
}

// Exhaustive backtracking over six independent choices.
const Program& wide_program() {
  static const Program p = parse_program(
      "d(a). d(b). d(c). d(e). d(f). d(g). d(h).\n"
      "loop :- d(X), d(Y), d(Z), d(U), d(V), d(W), never(X, W).\n"
      ":- loop.");
  return p;
}

void run_steps(benchmark::State& state, const Program& prog) {
  RunOptions opt;
  opt.limits.max_steps = static_cast<std::size_t>(state.range(0));
  std::size_t steps = 0;
  for (auto _ : state) {
    const RunResult r = run(prog, opt);
    steps += r.trace.steps.size();
    benchmark::DoNotOptimize(r.answers.data());
  }
  state.counters["steps/s"] =
      benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

}  // namespace

static void BM_RunChain(benchmark::State& state) { run_steps(state, chain_program()); }
BENCHMARK(BM_RunChain)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_RunWide(benchmark::State& state) { run_steps(state, wide_program()); }
BENCHMARK(BM_RunWide)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ExtractTrace(benchmark::State& state) {
  RunLimits limits;
  limits.max_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_trace(wide_program(), limits).events.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExtractTrace)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Rebuild(benchmark::State& state) {
  RunLimits limits;
  limits.max_steps = static_cast<std::size_t>(state.range(0));
  auto events = extract_trace(wide_program(), limits).events;
  // A capped trace may stop on a Redo, which no complete trace ends with.
  while (!events.empty() && events.back().port == Port::redo) {
    events.pop_back();
  }
  const RestrictedState q0 = initial_state_from(events);
  for (auto _ : state) {
    Rebuilder rb(q0);
    for (const auto& e : events) {
      benchmark::DoNotOptimize(rb.push(e));
    }
    benchmark::DoNotOptimize(rb.finish());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size()));
}
BENCHMARK(BM_Rebuild)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_CheckSuitePrograms(benchmark::State& state) {
  std::vector<Program> programs;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    programs.push_back(gen_program(suite_params(seed)));
  }
  CheckLimits limits;
  limits.run.max_steps = 10000;
  std::size_t steps = 0;
  for (auto _ : state) {
    for (const auto& p : programs) {
      steps += check_faithfulness(p, limits).steps_checked;
    }
  }
  state.counters["steps/s"] =
      benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CheckSuitePrograms)->Unit(benchmark::kMillisecond);

static void BM_Unify(benchmark::State& state) {
  const Term a = parse_term("f(X, g(Y, h(Z, a)), Y, k(W))");
  const Term b = parse_term("f(g(b, c), g(U, h(d, V)), c, k(k(e)))");
  for (auto _ : state) {
    benchmark::DoNotOptimize(unify(a, b, {}));
  }
}
BENCHMARK(BM_Unify);

BENCHMARK_MAIN();
