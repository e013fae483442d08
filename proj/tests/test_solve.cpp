#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "scatterbd/oracle.hpp"
#include "scatterbd/solve.hpp"

using namespace scatterbd;

TEST(Solve, PairExamples) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  EXPECT_TRUE(solve_with_backdoor(I, {3}, s.langs));
  EXPECT_EQ(count_with_backdoor(I, {3}, s.langs), BigInt(24));
  EXPECT_EQ(oracle_count(I), BigInt(24));

  auto rep = count(I, 1, s.langs);
  EXPECT_TRUE(rep.sat);
  EXPECT_EQ(rep.count, BigInt(24));
  EXPECT_EQ(rep.backdoor, (VarSet{3}));
  ASSERT_TRUE(rep.stats.has_value());

  try {
    count(I, 0, s.langs);
    FAIL() << "expected NoBackdoor";
  } catch (const NoBackdoor& e) {
    EXPECT_EQ(e.result.status, DetectStatus::none_certified);
  }
  EXPECT_THROW(count_with_backdoor(I, {1}, s.langs), Error);
}

TEST(Solve, Breakdown) {
  auto s = fx::horn_dual();
  Instance I = fx::i_pair(s);
  auto rep = evaluate_with_backdoor(I, {3}, s.langs, true, true);
  ASSERT_EQ(rep.breakdown.size(), 2u);
  BigInt sum = 0;
  for (const auto& a : rep.breakdown) {
    EXPECT_EQ(a.components.size(), 2u);
    sum += a.cost;
  }
  EXPECT_EQ(sum, rep.count);
  // x3 = 0: H free on x1 x2 (4), A restricted to x4 ∨ x5 (3).
  EXPECT_EQ(rep.breakdown[0].cost, BigInt(12));
}

TEST(Solve, EmptyRelationIsUnsat) {
  auto s = fx::horn_dual();
  Instance I(s.domain, s.store);
  I.add_constraint({{1, 2, 3}, s.store->intern(Relation(3, {}))});
  I.add_constraint({{3, 4, 5}, s.A});
  EXPECT_FALSE(solve_with_backdoor(I, {1, 2, 3}, s.langs));
  EXPECT_EQ(count_with_backdoor(I, {1, 2, 3}, s.langs), BigInt(0));
}

TEST(Solve, TrivialInstances) {
  auto s = fx::horn_dual();
  Instance I(s.domain, s.store);
  for (VarId v = 0; v < 3; ++v) I.add_variable(v);
  EXPECT_TRUE(solve_with_backdoor(I, {}, s.langs));
  EXPECT_EQ(count_with_backdoor(I, {}, s.langs), BigInt(8));

  auto store = std::make_shared<RelationStore>();
  Domain d{2};
  LanguageList aff{builtin_language("affine3", d, store)};
  Instance X(d, store);
  X.add_constraint({{0, 1}, store->intern(Relation(2, {{0, 1}, {1, 0}}))});
  EXPECT_EQ(count_with_backdoor(X, {}, aff), BigInt(2));

  Instance J(s.domain, s.store);
  J.add_constraint({{1, 2, 3}, s.H});
  auto rep = solve(J, 0, s.langs);
  EXPECT_TRUE(rep.sat);
  EXPECT_TRUE(rep.backdoor.empty());
}

TEST(Solve, AgreesWithOracle) {
  std::mt19937_64 rng(2024);
  auto s = fx::horn_dual();
  int sat = 0;
  for (int iter = 0; iter < 500; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 11);
    Instance I = fx::random_instance(s, rng, n, 1 + static_cast<int>(rng() % 8), false);
    auto z = oracle_detect(I, 3, s.langs);
    if (!z) continue;
    auto rep = evaluate_with_backdoor(I, *z, s.langs, true);
    ASSERT_EQ(rep.count, oracle_count(I)) << "iteration " << iter;
    ASSERT_EQ(solve_with_backdoor(I, *z, s.langs), oracle_decide(I)) << "iteration " << iter;
    sat += rep.sat;
  }
  EXPECT_GT(sat, 0);
}

TEST(Solve, CountIndependentOfBackdoor) {
  std::mt19937_64 rng(31);
  auto s = fx::horn_dual();
  int distinct = 0;
  for (int iter = 0; iter < 300; ++iter) {
    Instance I = fx::random_instance(s, rng, 7, 5, false);
    std::vector<VarSet> found;
    for_each_subset(I.variables(), 2, [&](const VarSet& X) {
      if (verify_by_definition(I, X, s.langs)) found.push_back(X);
      return false;
    });
    if (found.size() < 2) continue;
    const BigInt expect = count_with_backdoor(I, found.front(), s.langs);
    for (const auto& X : found) EXPECT_EQ(count_with_backdoor(I, X, s.langs), expect);
    if (!set_subset(found.front(), found.back())) ++distinct;
  }
  EXPECT_GT(distinct, 10);
}
