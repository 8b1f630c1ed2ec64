#pragma once

#include <utility>
#include <vector>

#include "svmp/core.hpp"
#include "svmp/mil.hpp"
#include "svmp/svm.hpp"

namespace svmp::ordered {

/// Multiple-instance objective plus a squared-hinge penalty on temporal
/// order among selected rows:
///   objective_p1(...) + c2 * sum_{l < m} max(0, delta + w^T x_l - w^T x_m)^2
/// Pairs are drawn from `order_rows` when given, otherwise from the rows
/// labeled +1 by theta; l < m always refers to temporal (row) order.
struct OrderedProblem {
  const FeatureBag& bag;
  const NegativeBag& neg;
  MilLabeling theta;
  double c1 = 1.0;
  double c2 = 1.0;
  double delta = 1.0;
  double eta = 1.0;
  PairMode pair_mode = PairMode::kAllPairs;
  std::vector<Index> order_rows;
};

using Pair = std::pair<Index, Index>;

/// (l, m) row pairs with l < m: all pairs, or consecutive selected rows.
std::vector<Pair> ordering_pairs(const OrderedProblem& problem);

double ordered_objective(const OrderedProblem& problem, const Eigen::Ref<const Vector>& w, double b);

struct Gradient {
  Vector w;
  double b = 0.0;
};

/// A subgradient; equal to the gradient wherever no hinge sits at its kink.
Gradient ordered_gradient(const OrderedProblem& problem, const Eigen::Ref<const Vector>& w, double b);

struct InnerResult {
  Vector w;
  double b = 0.0;
  double objective = 0.0;
  // Objective of the returned iterate after each iteration; non-increasing.
  std::vector<double> trace;
  int iterations = 0;
  bool converged = false;
};

/// Full-batch gradient descent with Armijo backtracking from w = 0, b = 0.
/// Stops when ||g|| <= tol * (1 + |f|) or after max_iters; a line search
/// that cannot find a decrease ends the run with converged = false.
InnerResult minimize_gradient_descent(const OrderedProblem& problem, int max_iters, double tol);

/// Exact solve: the objective is rewritten as a linear SVM whose classification
/// rows use the hinge and whose order pairs (x_m - x_l) / delta use the squared
/// hinge with cost c2 * delta^2, then handed to the dual coordinate engine.
InnerResult minimize_dual(const OrderedProblem& problem, const svm::SolveOptions& options);

/// Counts pairs l < m over all bag rows with w^T x_l > w^T x_m.
Index count_order_violations(const Eigen::Ref<const Vector>& w, const FeatureBag& bag);

/// Param-tuning ladder where each rung selects rows by the unordered solution
/// at that C1, then re-solves with the order penalty over the selected rows.
/// Feasibility is measured exactly as for param tuning. When `traces` is
/// given, it receives the inner objective trace of every ordered solve.
mil::PoolResult pool_ordered(const FeatureBag& bag, const NegativeBag& neg,
                             const PoolingConfig& config,
                             std::vector<std::vector<double>>* traces = nullptr);

}  // namespace svmp::ordered
