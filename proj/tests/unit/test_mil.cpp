#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "svmp/mil.hpp"

using namespace svmp;

namespace {

PoolingConfig small_config(double eta) {
  PoolingConfig c;
  c.eta = eta;
  c.c1 = 1.0;
  c.solver_tol = 1e-9;
  c.max_solver_epochs = 100000;
  return c;
}

}  // namespace

TEST(Mil, ObjectiveRejectsInfeasibleLabeling) {
  std::mt19937_64 rng(1);
  const FeatureBag bag = svmp_test::random_bag(rng, 4, 2);
  const NegativeBag neg = svmp_test::random_neg(rng, 3, 2);
  MilLabeling l{{1, -1, -1, -1}};
  try {
    mil::objective_p1(bag, neg, l, Vector::Zero(2), 0.0, 1.0, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInfeasibleLabeling);
  }
  l.theta = {1, 1, -1, -1};
  // At w = 0, b = 0 every hinge term is 1.
  EXPECT_DOUBLE_EQ(mil::objective_p1(bag, neg, l, Vector::Zero(2), 0.0, 2.0, 0.5), 14.0);
}

TEST(Mil, TopReductionsPreferHighScoresAndLowIndexOnTies) {
  Vector s(5);
  s << 0.3, 2.0, 0.3, -1.0, 5.0;
  const MilLabeling l = mil::select_top_reductions(s, 3);
  // Reductions saturate at 2 for s >= 1, so rows 1 and 4 tie; then row 0 beats row 2.
  EXPECT_EQ(l.theta, (std::vector<int>{1, 1, -1, -1, 1}));
  EXPECT_EQ(mil::select_top_reductions(s, 0).positives(), 0);
  EXPECT_THROW(mil::select_top_reductions(s, 6), Error);
}

TEST(Mil, LadderIsGeometricAndInclusive) {
  PoolingConfig c;
  const auto rungs = mil::c1_ladder(c);
  ASSERT_EQ(rungs.size(), 9U);
  EXPECT_DOUBLE_EQ(rungs.front(), 1e-4);
  EXPECT_NEAR(rungs.back(), 1e4, 1e-8);
}

TEST(Mil, LabelingFromScoresPromotesHighest) {
  Vector s(4);
  s << -0.5, 1.0, -0.1, -2.0;
  const MilLabeling l = mil::labeling_from_scores(s, 3);
  EXPECT_EQ(l.theta, (std::vector<int>{1, 1, 1, -1}));
  EXPECT_EQ(mil::labeling_from_scores(s, 0).theta, (std::vector<int>{-1, 1, -1, -1}));
}

TEST(Mil, EnumerateMatchesBruteForce) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureBag bag = svmp_test::random_bag(rng, 5, 3, 0.5);
    const NegativeBag neg = svmp_test::random_neg(rng, 6, 3, -0.5);
    const PoolingConfig c = small_config(0.5);
    const mil::PoolResult r = mil::pool_enumerate(bag, neg, c);
    const auto ref = svmp_test::brute_force_mil(bag.features, neg.features, c.c1, 3, 4000);
    EXPECT_LE(r.objective, ref.objective + 1e-6 * std::max(1.0, ref.objective));
    EXPECT_GE(r.labeling.positives(), 3);
    EXPECT_TRUE(r.feasible);
    EXPECT_EQ(r.descriptor.meta.iterations, 16);  // C(5,3) + C(5,4) + C(5,5) subsets
  }
}

TEST(Mil, EnumerateRespectsCap) {
  std::mt19937_64 rng(3);
  const FeatureBag bag = svmp_test::random_bag(rng, 6, 2);
  const NegativeBag neg = svmp_test::random_neg(rng, 4, 2);
  PoolingConfig c = small_config(0.5);
  c.enumeration_cap = 5;
  EXPECT_THROW(mil::pool_enumerate(bag, neg, c), Error);
}

TEST(Mil, AlternatingIsFeasibleAndNoBetterThanOptimum) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const FeatureBag bag = svmp_test::random_bag(rng, 7, 2, 0.5);
    const NegativeBag neg = svmp_test::random_neg(rng, 8, 2, -0.5);
    const PoolingConfig c = small_config(0.5);
    const auto opt = mil::pool_enumerate(bag, neg, c);
    const auto alt = mil::pool_alternating(bag, neg, c);
    EXPECT_EQ(alt.labeling.positives(), 4);
    EXPECT_TRUE(alt.feasible);
    EXPECT_GE(alt.objective, opt.objective - 1e-6 * std::max(1.0, opt.objective));
    EXPECT_EQ(alt.descriptor.meta.algorithm, Algorithm::kAlternating);
  }
}

TEST(Mil, ParamTuningReportsClassifiedFraction) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureBag bag = svmp_test::random_bag(rng, 20, 4, 0.3);
    const NegativeBag neg = svmp_test::random_neg(rng, 30, 4, -0.3);
    PoolingConfig c;
    c.eta = 0.6;
    const auto r = mil::pool_param_tuning(bag, neg, c);
    EXPECT_DOUBLE_EQ(r.descriptor.meta.eta_achieved, classified_fraction(r.descriptor, bag));
    if (r.feasible) EXPECT_GE(r.descriptor.meta.eta_achieved, 0.6);
    EXPECT_GE(r.labeling.positives(), min_positive_count(0.6, 20));
  }
}

TEST(Mil, ParamTuningStopsAtFirstFeasibleRung) {
  // Positives far from negatives: the smallest C already classifies them all.
  std::mt19937_64 rng(6);
  const FeatureBag bag = svmp_test::random_bag(rng, 10, 3, 5.0);
  const NegativeBag neg = svmp_test::random_neg(rng, 10, 3, -5.0);
  PoolingConfig c;
  c.eta = 0.9;
  const auto r = mil::pool_param_tuning(bag, neg, c);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.descriptor.meta.iterations, 1);
  EXPECT_DOUBLE_EQ(r.descriptor.meta.c1, c.c1_init);
}
