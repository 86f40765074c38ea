#include <gtest/gtest.h>

#include <map>
#include <set>

#include "boxtrace/error.hpp"
#include "boxtrace/harness.hpp"
#include "support.hpp"

namespace boxtrace {
namespace {

using testing::byrd_example;
using testing::term;

TEST(Reference, Examples) {
  const ReferenceResult a = reference_solve(byrd_example());
  EXPECT_FALSE(a.cap_exceeded);
  EXPECT_EQ(a.answers, (std::vector<Term>{term("goal")}));
  const ReferenceResult b = reference_solve(parse_program("p(a). p(b).\n:- p(X)."));
  EXPECT_EQ(b.answers, (std::vector<Term>{term("p(a)"), term("p(b)")}));
  EXPECT_TRUE(reference_solve(parse_program("p(a).\n:- q.")).answers.empty());
}

TEST(Reference, CapsStopInfiniteSearch) {
  const ReferenceResult r = reference_solve(parse_program("p :- p.\n:- p."));
  EXPECT_TRUE(r.cap_exceeded);
}

TEST(Reference, RenamesEachResolution) {
  const Program prog = parse_program(
      "nat(z).\n"
      "nat(s(X)) :- nat(X).\n"
      ":- nat(s(s(Y))).");
  ReferenceCaps caps;
  caps.max_steps = 20;
  const ReferenceResult r = reference_solve(prog, caps);
  ASSERT_FALSE(r.answers.empty());
  EXPECT_EQ(r.answers[0], term("nat(s(s(z)))"));
}

TEST(AnswerMultiset, IgnoresOrderAndNames) {
  EXPECT_EQ(answer_multiset({term("p(X,a)"), term("q")}),
            answer_multiset({term("q"), term("p(Y_3,a)")}));
  EXPECT_NE(answer_multiset({term("q"), term("q")}), answer_multiset({term("q")}));
}

TEST(Generator, Deterministic) {
  GenParams gp;
  gp.seed = 42;
  EXPECT_EQ(gen_program(gp), gen_program(gp));
  gp.seed = 43;
  EXPECT_NE(render_program(gen_program(gp)), render_program(gen_program(GenParams{.seed = 42})));
  EXPECT_EQ(render_program(gen_program(suite_params(9))),
            render_program(gen_program(suite_params(9))));
}

TEST(Generator, RejectsBadParams) {
  GenParams gp;
  gp.predicate_count = 0;
  EXPECT_THROW(gen_program(gp), PreconditionError);
  gp = GenParams{};
  gp.recursion_probability = 1.5;
  EXPECT_THROW(validate(gp), PreconditionError);
}

// Edges p_i -> p_j for every body goal of a clause of p_i.
bool acyclic(const Program& prog) {
  std::map<std::string, std::set<std::string>> edges;
  for (const auto& c : prog.clauses) {
    for (const auto& g : c.body) {
      edges[c.head.name()].insert(g.name());
    }
  }
  std::map<std::string, int> colour;
  std::function<bool(const std::string&)> visit = [&](const std::string& p) {
    colour[p] = 1;
    for (const auto& q : edges[p]) {
      if (colour[q] == 1 || (colour[q] == 0 && !visit(q))) {
        return false;
      }
    }
    colour[p] = 2;
    return true;
  };
  for (const auto& [p, _] : edges) {
    if (colour[p] == 0 && !visit(p)) {
      return false;
    }
  }
  return true;
}

TEST(Generator, NoRecursionMeansAcyclic) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    GenParams gp = suite_params(seed);
    gp.recursion_probability = 0.0;
    const Program prog = gen_program(gp);
    ASSERT_TRUE(acyclic(prog)) << render_program(prog);
    ASSERT_EQ(parse_program(render_program(prog)), prog);
  }
}

TEST(Generator, SuiteIncludesRecursion) {
  int cyclic = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    cyclic += acyclic(gen_program(suite_params(seed))) ? 0 : 1;
  }
  EXPECT_GT(cyclic, 0);
}

TEST(Check, ByrdExamplePasses) {
  const FaithfulnessReport r = check_faithfulness(byrd_example());
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.steps_checked, 10u);
  EXPECT_EQ(r.answers, AnswerCheck::match);
  EXPECT_FALSE(r.divergence);
  EXPECT_FALSE(r.determinism_violation);
  EXPECT_EQ(render_report(r).substr(0, 15), "pass, 10 steps\n");
  EXPECT_EQ(r.program_digest, program_digest(byrd_example()));
  EXPECT_EQ(r.program_digest.size(), 16u);
}

TEST(Check, CappedRunIsLimitHit) {
  CheckLimits limits;
  limits.run.max_steps = 100;
  const FaithfulnessReport r = check_faithfulness(parse_program("p :- p.\n:- p."), limits);
  EXPECT_EQ(r.verdict, Verdict::limit_hit);
  EXPECT_EQ(r.steps_checked, 100u);
  EXPECT_EQ(r.answers, AnswerCheck::not_run);
}

TEST(Check, InvariantRecheckOption) {
  CheckLimits limits;
  limits.check_engine_invariants = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    limits.run.max_steps = 1000;
    const auto r = check_faithfulness(gen_program(suite_params(seed)), limits);
    EXPECT_NE(r.verdict, Verdict::fail) << "seed " << seed << "\n" << render_report(r);
  }
}

TEST(CheckTrace, ExtractedTracePasses) {
  const Program prog = byrd_example();
  const auto r = check_trace(prog, extract_trace(prog).events);
  EXPECT_EQ(r.verdict, Verdict::pass);
  EXPECT_EQ(r.steps_checked, 10u);
}

TEST(CheckTrace, SwappedEventsFail) {
  const Program prog = byrd_example();
  auto events = extract_trace(prog).events;
  std::swap(events[3], events[4]);
  std::swap(events[3].chrono, events[4].chrono);
  const auto r = check_trace(prog, events);
  EXPECT_EQ(r.verdict, Verdict::fail);
  ASSERT_TRUE(r.divergence);
  EXPECT_EQ(r.divergence->chrono, 4u) << render_report(r);
}

TEST(CheckTrace, EveryPortAndNodeCorruptionIsDetected) {
  const Program prog = byrd_example();
  const auto events = extract_trace(prog).events;
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (Port p : {Port::call, Port::exit, Port::fail, Port::redo}) {
      if (p == events[i].port) {
        continue;
      }
      auto bad = events;
      bad[i].port = p;
      EXPECT_EQ(check_trace(prog, bad).verdict, Verdict::fail) << "event " << i + 1;
    }
    for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3},
                            std::uint64_t{4}, std::uint64_t{9}}) {
      if (n == events[i].node) {
        continue;
      }
      auto bad = events;
      bad[i].node = n;
      EXPECT_EQ(check_trace(prog, bad).verdict, Verdict::fail) << "event " << i + 1;
    }
  }
}

TEST(CheckTrace, DepthCorruptionIsNotDetected) {
  const Program prog = byrd_example();
  auto events = extract_trace(prog).events;
  for (auto& e : events) {
    e.depth = 99;
  }
  EXPECT_EQ(check_trace(prog, events).verdict, Verdict::pass);
}

TEST(CheckTrace, ShortAndLongStreamsFail) {
  const Program prog = byrd_example();
  auto events = extract_trace(prog).events;
  auto shorter = events;
  shorter.pop_back();
  EXPECT_EQ(check_trace(prog, shorter).verdict, Verdict::fail);
  auto longer = events;
  longer.push_back(TraceEvent{11, 1, 1, Port::redo, term("goal")});
  EXPECT_EQ(check_trace(prog, longer).verdict, Verdict::fail);
}

TEST(Report, Json) {
  const std::string j = report_to_json(check_faithfulness(byrd_example()));
  EXPECT_NE(j.find("\"verdict\":\"pass\""), std::string::npos) << j;
  EXPECT_NE(j.find("\"steps_checked\":10"), std::string::npos) << j;
}

TEST(Suite, SmallSweepPassesOnAllThreadCounts) {
  CheckLimits limits;
  limits.run.max_steps = 2000;
  const SuiteSummary one = run_suite(1, 40, limits, 1);
  const SuiteSummary four = run_suite(1, 40, limits, 4);
  EXPECT_EQ(one.failed, 0u);
  EXPECT_EQ(one.answer_mismatches, 0u);
  EXPECT_EQ(one.determinism_violations, 0u);
  EXPECT_EQ(one.programs, 40u);
  EXPECT_EQ(one.passed + one.limit_hit, 40u);
  EXPECT_EQ(one.steps, four.steps);
  EXPECT_EQ(one.passed, four.passed);
}

}  // namespace
}  // namespace boxtrace
