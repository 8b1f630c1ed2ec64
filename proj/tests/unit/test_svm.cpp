#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "fixtures.hpp"
#include "svmp/svm.hpp"

using namespace svmp;

namespace {

svm::SvmProblem random_problem(std::mt19937_64& rng, Index n, Index p, double c, svm::Loss loss) {
  svm::SvmProblem prob;
  prob.points = svmp_test::gaussian(rng, n, p);
  prob.labels.resize(n);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < n; ++i) {
    prob.labels(i) = coin(rng) ? 1.0 : -1.0;
    prob.points.row(i).array() += 0.7 * prob.labels(i);
  }
  prob.c = c;
  prob.loss = loss;
  return prob;
}

}  // namespace

TEST(Svm, SymmetricPairClosedForm) {
  svm::SvmProblem prob;
  prob.points = Matrix(2, 1);
  prob.points << 1.0, -1.0;
  prob.labels = Vector(2);
  prob.labels << 1.0, -1.0;
  prob.c = 0.25;
  const svm::SvmSolution sol = svm::solve(prob, {1e-10, 100000});
  // Symmetry forces b = 0; then w minimizes w^2/2 + 2c max(0, 1 - w).
  EXPECT_NEAR(sol.w(0), 0.5, 1e-6);
  EXPECT_NEAR(sol.b, 0.0, 1e-6);
  EXPECT_NEAR(sol.primal_objective, 0.375, 1e-8);
  EXPECT_TRUE(sol.converged);
}

TEST(Svm, ConvergesWithSmallGap) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto prob = random_problem(rng, 40, 5, 1.0, trial % 2 ? svm::Loss::kHinge : svm::Loss::kSquaredHinge);
    const svm::SvmSolution sol = svm::solve(prob);
    EXPECT_TRUE(sol.converged);
    EXPECT_LE(sol.duality_gap, 1e-6 * std::max(1.0, sol.primal_objective));
    EXPECT_NEAR(sol.primal_objective, svm::objective(prob, sol.w, sol.b), 1e-9 * std::max(1.0, sol.primal_objective));
    EXPECT_LE(sol.dual_objective, sol.primal_objective + 1e-12);
  }
}

TEST(Svm, MatchesDualProjectedGradientOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto prob = random_problem(rng, 25, 3, 0.5, svm::Loss::kHinge);
    const svm::SvmSolution sol = svm::solve(prob, {1e-9, 100000});
    const auto ref = svmp_test::dual_pg_svm(prob.points, prob.labels, prob.c, 20000);
    EXPECT_NEAR(sol.primal_objective, ref.objective, 1e-6 * std::max(1.0, ref.objective));
  }
}

TEST(Svm, MatchesPrimalSubgradientOracleSquaredHinge) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const auto prob = random_problem(rng, 20, 3, 0.3, svm::Loss::kSquaredHinge);
    const svm::SvmSolution sol = svm::solve(prob, {1e-10, 100000});
    const auto ref = svmp_test::subgradient_svm(prob.points, prob.labels, prob.c, true, 20000);
    EXPECT_GE(ref.objective, sol.primal_objective - 1e-9);
    EXPECT_NEAR(sol.primal_objective, ref.objective, 1e-4 * std::max(1.0, ref.objective));
  }
}

TEST(Svm, SampleWeightsEqualDuplication) {
  std::mt19937_64 rng(8);
  auto prob = random_problem(rng, 10, 2, 1.0, svm::Loss::kHinge);
  svm::SvmProblem dup = prob;
  dup.points.conservativeResize(11, Eigen::NoChange);
  dup.points.row(10) = prob.points.row(0);
  dup.labels.conservativeResize(11);
  dup.labels(10) = prob.labels(0);
  prob.sample_weights = Vector::Ones(10);
  prob.sample_weights(0) = 2.0;
  const auto a = svm::solve(prob, {1e-10, 100000});
  const auto b = svm::solve(dup, {1e-10, 100000});
  EXPECT_NEAR(a.primal_objective, b.primal_objective, 1e-7);
  EXPECT_LT((a.w - b.w).norm(), 1e-3);
}

TEST(Svm, NoBiasLeavesBZero) {
  std::mt19937_64 rng(9);
  auto prob = random_problem(rng, 15, 3, 1.0, svm::Loss::kHinge);
  prob.fit_bias = false;
  const auto sol = svm::solve(prob);
  EXPECT_EQ(sol.b, 0.0);
}

TEST(Svm, RejectsBadInput) {
  svm::SvmProblem prob;
  prob.points = Matrix::Ones(2, 2);
  prob.labels = Vector::Ones(2);
  prob.labels(1) = 0.5;
  EXPECT_THROW(svm::solve(prob), Error);
  prob.labels(1) = -1.0;
  prob.c = 0.0;
  EXPECT_THROW(svm::solve(prob), Error);
  prob.c = 1.0;
  prob.labels = Vector::Ones(3);
  EXPECT_THROW(svm::solve(prob), Error);
}

TEST(Svm, MixedProblemReducesToPlainHinge) {
  std::mt19937_64 rng(10);
  const auto prob = random_problem(rng, 30, 4, 2.0, svm::Loss::kHinge);
  svm::MixedProblem mixed;
  mixed.rows.resize(30, 5);
  mixed.rows << prob.points, Vector::Ones(30);
  mixed.labels = prob.labels;
  mixed.costs = Vector::Constant(30, prob.c);
  mixed.losses.assign(30, svm::Loss::kHinge);
  const auto a = svm::solve(prob, {1e-9, 100000});
  const auto b = svm::solve_mixed(mixed, {1e-9, 100000});
  EXPECT_NEAR(a.primal_objective, b.primal_objective, 1e-7 * std::max(1.0, a.primal_objective));
  for (std::size_t k = 1; k < b.trace.size(); ++k) EXPECT_LE(b.trace[k], b.trace[k - 1]);
}
