#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "boxtrace/dewey.hpp"
#include "boxtrace/error.hpp"

namespace boxtrace {
namespace {

DeweyPath P(const char* text) { return DeweyPath::parse(text); }

TEST(Dewey, ParseAndRender) {
  EXPECT_TRUE(P("ε").is_root());
  EXPECT_TRUE(P("").is_root());
  EXPECT_EQ(P("1.2.1"), (DeweyPath{1, 2, 1}));
  EXPECT_EQ(P("1.2.1").to_string(), "1.2.1");
  EXPECT_EQ(DeweyPath::root().to_string(), "ε");
  EXPECT_THROW(P("1.0"), PreconditionError);
  EXPECT_THROW(P("1..2"), PreconditionError);
  EXPECT_THROW(P("x"), PreconditionError);
}

TEST(Dewey, OrderingExamples) {
  EXPECT_TRUE(dewey_less(P("ε"), P("1")));
  EXPECT_TRUE(dewey_less(P("1.1"), P("1.2")));
  EXPECT_FALSE(dewey_less(P("2"), P("1.1")));
  EXPECT_TRUE(dewey_less(P("1.1"), P("2")));
  EXPECT_FALSE(dewey_less(P("1"), P("1")));
}

TEST(Dewey, Parent) {
  EXPECT_EQ(parent(P("1.2")), P("1"));
  EXPECT_EQ(parent(P("ε")), P("ε"));
  EXPECT_EQ(parent(P("2")), P("ε"));
}

TEST(Dewey, Brother) {
  EXPECT_EQ(new_brother_path(P("1")), P("2"));
  EXPECT_EQ(new_brother_path(P("1.1")), P("1.2"));
  EXPECT_THROW(new_brother_path(P("ε")), PreconditionError);
  EXPECT_THROW(P("ε").last(), PreconditionError);
}

TEST(Dewey, AncestorOrSelf) {
  EXPECT_TRUE(P("ε").is_ancestor_or_self_of(P("3.1")));
  EXPECT_TRUE(P("1.2").is_ancestor_or_self_of(P("1.2")));
  EXPECT_TRUE(P("1.2").is_ancestor_or_self_of(P("1.2.7.1")));
  EXPECT_FALSE(P("1.2").is_ancestor_or_self_of(P("1.3")));
  EXPECT_FALSE(P("1.2").is_ancestor_or_self_of(P("1")));
}

TEST(Dewey, InterningGivesEqualityByValue) {
  const DeweyPath a = P("1").child(2).child(3);
  const DeweyPath b{1, 2, 3};
  EXPECT_EQ(a, b);
  EXPECT_EQ(DeweyPathHash{}(a), DeweyPathHash{}(b));
  EXPECT_EQ(a.steps(), (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_EQ(a.length(), 3u);
}

// The skip-pointer comparison must agree with plain lexicographic order.
TEST(DeweyProperty, OrderMatchesLexicographic) {
  std::mt19937 rng(7);
  std::vector<std::vector<std::uint32_t>> raw;
  for (int i = 0; i < 400; ++i) {
    std::vector<std::uint32_t> s(rng() % 40);
    for (auto& x : s) {
      x = 1 + rng() % 2;
    }
    raw.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < raw.size(); j += 7) {
      const DeweyPath a(raw[i]);
      const DeweyPath b(raw[j]);
      ASSERT_EQ(a < b, raw[i] < raw[j]);
      ASSERT_EQ(a == b, raw[i] == raw[j]);
      const bool prefix = raw[i].size() <= raw[j].size() &&
                          std::equal(raw[i].begin(), raw[i].end(), raw[j].begin());
      ASSERT_EQ(a.is_ancestor_or_self_of(b), prefix);
    }
  }
}

TEST(DeweyProperty, DeepPathsDestroyWithoutRecursion) {
  DeweyPath p;
  for (int i = 0; i < 200000; ++i) {
    p = p.child(1);
  }
  EXPECT_EQ(p.length(), 200000u);
  p = DeweyPath::root();
  EXPECT_TRUE(p.is_root());
}

}  // namespace
}  // namespace boxtrace
