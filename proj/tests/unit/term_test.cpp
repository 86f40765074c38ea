#include <gtest/gtest.h>

#include <random>

#include "boxtrace/error.hpp"
#include "boxtrace/program.hpp"
#include "boxtrace/substitution.hpp"
#include "boxtrace/term.hpp"
#include "support.hpp"

namespace boxtrace {
namespace {

using testing::byrd_example;
using testing::term;

TEST(Term, CompoundNeedsArguments) {
  EXPECT_THROW(Term::compound("f", {}), PreconditionError);
  EXPECT_EQ(Term::compound("f", {Term::atom("a")}).arity(), 1u);
}

TEST(Term, RendersCanonically) {
  const Term t = Term::compound(
      "f", {Term::variable("X"), Term::variable("X", 3), Term::compound("g", {Term::atom("a")})});
  EXPECT_EQ(to_string(t), "f(X,X_3,g(a))");
}

TEST(Term, SizeAndGroundness) {
  EXPECT_EQ(term("f(a,g(b,c))").size(), 5u);
  EXPECT_TRUE(term("f(a,g(b,c))").is_ground());
  EXPECT_FALSE(term("f(a,g(X,c))").is_ground());
  EXPECT_FALSE(Term::variable("X").is_ground());
}

TEST(Term, AlphaEquivalenceIsABijection) {
  EXPECT_TRUE(alpha_equivalent(term("p(X,Y)"), term("p(A_1,B_2)")));
  EXPECT_FALSE(alpha_equivalent(term("p(X,X)"), term("p(A,B)")));
  EXPECT_FALSE(alpha_equivalent(term("p(X,Y)"), term("p(A,A)")));
  EXPECT_FALSE(alpha_equivalent(term("p(X)"), term("p(a)")));
  EXPECT_EQ(alpha_normalize(term("f(Y_2,X,Y_2)")), alpha_normalize(term("f(A,B,A)")));
}

TEST(Parse, ByrdExample) {
  const Program p = byrd_example();
  ASSERT_EQ(p.clauses.size(), 4u);
  EXPECT_EQ(to_string(p.goal), "goal");
  EXPECT_EQ(render_clause(p.clauses[0]), "goal :- p(X), eq(X,b).");
  EXPECT_TRUE(p.clauses[1].is_fact());
  EXPECT_EQ(p.clauses[3].source_index, 3u);
}

TEST(Parse, MinimalProgram) {
  const Program p = parse_program("a.\n:- a.");
  ASSERT_EQ(p.clauses.size(), 1u);
  EXPECT_TRUE(p.clauses[0].is_fact());
  EXPECT_EQ(to_string(p.goal), "a");
}

TEST(Parse, TwoFacts) {
  const Program p = parse_program("p(a). p(b).\n:- p(X).");
  ASSERT_EQ(p.clauses.size(), 2u);
  EXPECT_EQ(p.goal, Term::compound("p", {Term::variable("X")}));
}

TEST(Parse, CommentsAndWhitespace) {
  const Program p = parse_program("% header\np( a ) . % trailing\n :-   p( X ).\n");
  EXPECT_EQ(p.clauses.size(), 1u);
}

TEST(Parse, ErrorsCarryPositions) {
  try {
    parse_program("p(a).\np(b\n:- p(X).");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_program("p(a)."), ParseError);
  EXPECT_THROW(parse_program("p(a).\n:- p(a).\n:- p(b)."), ParseError);
  EXPECT_THROW(parse_program("p(1).\n:- p(X)."), ParseError);
  EXPECT_THROW(parse_program("X.\n:- p."), ParseError);
  EXPECT_THROW(parse_program("p(a) :- X.\n:- p(a)."), ParseError);
  EXPECT_THROW(parse_program("p([a]).\n:- p(X)."), ParseError);
}

TEST(Parse, RenamedVariableNamesAreReserved) {
  EXPECT_THROW(parse_program("p(X_1).\n:- p(a)."), ParseError);
  EXPECT_NO_THROW(parse_program("p(X_a, X1).\n:- p(a, b)."));
  EXPECT_EQ(parse_term("p(X_12)", VariableSyntax::trace).args()[0].index(), 12u);
  EXPECT_EQ(parse_term("p(X_a)", VariableSyntax::trace).args()[0].index(), 0u);
}

TEST(Parse, AnonymousVariablesAreDistinct) {
  const Program p = parse_program("p(_, _).\n:- p(a, b).");
  const auto vars = variables_of(p.clauses[0].head);
  ASSERT_EQ(vars.size(), 2u);
  EXPECT_NE(vars[0], vars[1]);
  EXPECT_EQ(parse_program(render_program(p)), p);
  // A written name that looks generated does not capture `_`.
  const Program q = parse_program("p(_G1, _).\n:- p(a, b).");
  const auto qv = variables_of(q.clauses[0].head);
  ASSERT_EQ(qv.size(), 2u);
  EXPECT_NE(qv[0], qv[1]);
}

TEST(Parse, RenderRoundTrip) {
  const Program p = byrd_example();
  EXPECT_EQ(parse_program(render_program(p)), p);
}

TEST(Unify, BindsVariable) {
  auto s = unify(term("p(X)"), term("p(a)"), {});
  ASSERT_TRUE(s);
  EXPECT_EQ(apply_subst(term("X"), *s), term("a"));
}

TEST(Unify, ClashFails) { EXPECT_FALSE(unify(term("eq(X,X)"), term("eq(a,b)"), {})); }

TEST(Unify, IdenticalVariables) {
  auto s = unify(term("X"), term("X"), {});
  ASSERT_TRUE(s);
  EXPECT_TRUE(s->empty());
}

TEST(Unify, OccursCheck) {
  EXPECT_FALSE(unify(term("X"), term("f(X)"), {}));
  EXPECT_FALSE(unify(term("f(X,Y)"), term("f(Y,g(X))"), {}));
}

TEST(Unify, InPlaceRestoresOnFailure) {
  Substitution s;
  ASSERT_TRUE(unify_in_place(term("Z"), term("c"), s));
  EXPECT_FALSE(unify_in_place(term("f(X,b)"), term("f(a,X)"), s));
  EXPECT_EQ(s.size(), 1u);
}

TEST(Unify, TrailUndo) {
  Substitution s;
  const auto m = s.mark();
  ASSERT_TRUE(unify_in_place(term("f(X,Y)"), term("f(a,b)"), s));
  EXPECT_EQ(s.size(), 2u);
  s.undo_to(m);
  EXPECT_TRUE(s.empty());
}

TEST(ApplySubst, Examples) {
  auto s = unify(term("X"), term("a"), {});
  ASSERT_TRUE(s);
  EXPECT_EQ(apply_subst(term("eq(X,b)"), *s), term("eq(a,b)"));
  EXPECT_EQ(apply_subst(term("a"), {}), term("a"));
  auto s2 = unify(term("X"), term("g(Y)"), {});
  ASSERT_TRUE(s2);
  EXPECT_EQ(apply_subst(term("f(X,Y)"), *s2), term("f(g(Y),Y)"));
}

TEST(RenameApart, SharingPreserved) {
  const Program p = parse_program("eq(X, X).\np(a).\nq(X).\n:- p(a).");
  const Clause r = rename_apart(p.clauses[0], 7);
  EXPECT_EQ(to_string(r.head), "eq(X_7,X_7)");
  EXPECT_EQ(rename_apart(p.clauses[1], 3), p.clauses[1]);
  const Clause a = rename_apart(p.clauses[2], 1);
  const Clause b = rename_apart(p.clauses[2], 2);
  EXPECT_NE(a.head.args()[0], b.head.args()[0]);
}

TEST(UsefulClauses, Examples) {
  const Program p = byrd_example();
  EXPECT_EQ(useful_clauses(term("p(X)"), p, {}), (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(useful_clauses(term("eq(a,b)"), p, {}).empty());
  EXPECT_TRUE(useful_clauses(term("q"), p, {}).empty());
  EXPECT_EQ(useful_clauses(term("goal"), p, {}), (std::vector<std::size_t>{0}));
}

TEST(UsefulClauses, SeesTheSubstitution) {
  const Program p = byrd_example();
  auto s = unify(term("X"), term("b"), {});
  ASSERT_TRUE(s);
  EXPECT_EQ(useful_clauses(term("p(X)"), p, *s), (std::vector<std::size_t>{2}));
}

// Random terms over a small signature for the algebraic properties.
class RandomTerms {
 public:
  explicit RandomTerms(unsigned seed) : rng_(seed) {}

  Term next(int depth = 3) {
    const auto pick = rng_() % 6;
    if (depth == 0 || pick < 2) {
      return Term::variable(std::string(1, static_cast<char>('X' + rng_() % 3)));
    }
    if (pick < 4) {
      return Term::atom(std::string(1, static_cast<char>('a' + rng_() % 2)));
    }
    if (pick == 4) {
      return Term::compound("f", {next(depth - 1)});
    }
    return Term::compound("g", {next(depth - 1), next(depth - 1)});
  }

 private:
  std::mt19937 rng_;
};

TEST(UnifyProperty, SymmetricAndSound) {
  RandomTerms gen(12345);
  int unified = 0;
  for (int i = 0; i < 3000; ++i) {
    const Term a = gen.next();
    const Term b = gen.next();
    const auto ab = unify(a, b, {});
    const auto ba = unify(b, a, {});
    ASSERT_EQ(ab.has_value(), ba.has_value()) << a << " / " << b;
    if (!ab) {
      continue;
    }
    ++unified;
    const Term ia = apply_subst(a, *ab);
    EXPECT_EQ(ia, apply_subst(b, *ab)) << a << " / " << b;
    // Both orientations give the same instance up to renaming.
    EXPECT_TRUE(alpha_equivalent(ia, apply_subst(a, *ba))) << a << " / " << b;
    // Idempotence.
    EXPECT_EQ(apply_subst(ia, *ab), ia);
  }
  EXPECT_GT(unified, 100);
}

TEST(UsefulClausesProperty, Subsequence) {
  const Program p = byrd_example();
  for (const char* g : {"p(X)", "eq(X,Y)", "eq(a,a)", "goal", "p(c)"}) {
    const auto idx = useful_clauses(term(g), p, {});
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    for (auto i : idx) {
      EXPECT_LT(i, p.clauses.size());
    }
  }
}

}  // namespace
}  // namespace boxtrace
