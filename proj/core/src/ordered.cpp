#include "svmp/ordered.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace svmp::ordered {
namespace {

void check_problem(const OrderedProblem& problem) {
  validate_pair(problem.bag, problem.neg);
  if (problem.theta.size() != problem.bag.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "ordered: labeling length differs from bag size");
  }
  if (!(problem.c1 > 0.0) || !(problem.c2 >= 0.0) || !std::isfinite(problem.c1) ||
      !std::isfinite(problem.c2)) {
    throw Error(ErrorKind::kInvalidArgument, "ordered: c1 must be positive and c2 nonnegative");
  }
  if (!(problem.delta > 0.0) || !std::isfinite(problem.delta)) {
    throw Error(ErrorKind::kInvalidArgument, "ordered: delta must be positive");
  }
  for (Index r : problem.order_rows) {
    if (r < 0 || r >= problem.bag.size()) {
      throw Error(ErrorKind::kInvalidArgument, "ordered: order row index out of range");
    }
  }
}

std::vector<Index> selected_rows(const OrderedProblem& problem) {
  std::vector<Index> rows = problem.order_rows;
  if (rows.empty()) {
    for (Index i = 0; i < problem.theta.size(); ++i) {
      if (problem.theta.theta[static_cast<std::size_t>(i)] > 0) rows.push_back(i);
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

double order_penalty(const OrderedProblem& problem, const std::vector<Pair>& pairs,
                     const Vector& projections) {
  double total = 0.0;
  for (const auto& [l, m] : pairs) {
    const double h = std::max(0.0, problem.delta + projections(l) - projections(m));
    total += h * h;
  }
  return problem.c2 * total;
}

}  // namespace

std::vector<Pair> ordering_pairs(const OrderedProblem& problem) {
  const std::vector<Index> rows = selected_rows(problem);
  std::vector<Pair> pairs;
  const std::size_t r = rows.size();
  if (r < 2) return pairs;
  if (problem.pair_mode == PairMode::kConsecutive) {
    pairs.reserve(r - 1);
    for (std::size_t k = 0; k + 1 < r; ++k) pairs.emplace_back(rows[k], rows[k + 1]);
  } else {
    pairs.reserve(r * (r - 1) / 2);
    for (std::size_t a = 0; a < r; ++a) {
      for (std::size_t b = a + 1; b < r; ++b) pairs.emplace_back(rows[a], rows[b]);
    }
  }
  return pairs;
}

double ordered_objective(const OrderedProblem& problem, const Eigen::Ref<const Vector>& w, double b) {
  check_problem(problem);
  const double base =
      mil::objective_p1(problem.bag, problem.neg, problem.theta, w, b, problem.c1, problem.eta);
  if (problem.c2 == 0.0) return base;
  const Vector projections = problem.bag.features * w;
  return base + order_penalty(problem, ordering_pairs(problem), projections);
}

Gradient ordered_gradient(const OrderedProblem& problem, const Eigen::Ref<const Vector>& w, double b) {
  check_problem(problem);
  if (w.size() != problem.bag.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "ordered_gradient: w has the wrong dimension");
  }
  Gradient g{w, b};
  const Vector pos_proj = problem.bag.features * w;
  for (Index i = 0; i < problem.bag.size(); ++i) {
    const double theta = problem.theta.theta[static_cast<std::size_t>(i)];
    if (1.0 - theta * (pos_proj(i) + b) > 0.0) {
      g.w.noalias() -= (problem.c1 * theta) * problem.bag.features.row(i).transpose();
      g.b -= problem.c1 * theta;
    }
  }
  for (Index i = 0; i < problem.neg.size(); ++i) {
    if (1.0 + problem.neg.features.row(i).dot(w) + b > 0.0) {
      g.w.noalias() += problem.c1 * problem.neg.features.row(i).transpose();
      g.b += problem.c1;
    }
  }
  if (problem.c2 > 0.0) {
    for (const auto& [l, m] : ordering_pairs(problem)) {
      const double h = problem.delta + pos_proj(l) - pos_proj(m);
      if (h > 0.0) {
        g.w.noalias() += (2.0 * problem.c2 * h) *
                         (problem.bag.features.row(l) - problem.bag.features.row(m)).transpose();
      }
    }
  }
  return g;
}

InnerResult minimize_gradient_descent(const OrderedProblem& problem, int max_iters, double tol) {
  check_problem(problem);
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;
  constexpr double kMaxStep = 1e6;

  InnerResult out;
  out.w = Vector::Zero(problem.bag.dim());
  out.b = 0.0;
  out.objective = ordered_objective(problem, out.w, out.b);
  double step = 1.0;

  for (int it = 1; it <= max_iters; ++it) {
    const Gradient g = ordered_gradient(problem, out.w, out.b);
    const double gnorm2 = g.w.squaredNorm() + g.b * g.b;
    if (std::sqrt(gnorm2) <= tol * (1.0 + std::abs(out.objective))) {
      out.converged = true;
      return out;
    }
    step = std::min(2.0 * step, kMaxStep);
    bool accepted = false;
    while (step >= kMinStep) {
      const Vector w_next = out.w - step * g.w;
      const double b_next = out.b - step * g.b;
      const double f_next = ordered_objective(problem, w_next, b_next);
      if (f_next <= out.objective - kArmijo * step * gnorm2) {
        out.w = w_next;
        out.b = b_next;
        out.objective = f_next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = it;
    if (!accepted) return out;
    out.trace.push_back(out.objective);
  }
  return out;
}

InnerResult minimize_dual(const OrderedProblem& problem, const svm::SolveOptions& options) {
  check_problem(problem);
  const Index n = problem.bag.size();
  const Index m = problem.neg.size();
  const Index p = problem.bag.dim();
  const std::vector<Pair> pairs = problem.c2 > 0.0 ? ordering_pairs(problem) : std::vector<Pair>{};
  const auto k = static_cast<Index>(pairs.size());

  svm::MixedProblem mixed;
  mixed.rows.setZero(n + m + k, p + 1);
  mixed.labels.resize(n + m + k);
  mixed.costs.resize(n + m + k);
  mixed.losses.assign(static_cast<std::size_t>(n + m + k), svm::Loss::kHinge);

  mixed.rows.block(0, 0, n, p) = problem.bag.features;
  mixed.rows.block(n, 0, m, p) = problem.neg.features;
  mixed.rows.block(0, p, n + m, 1).setOnes();
  for (Index i = 0; i < n; ++i) mixed.labels(i) = problem.theta.theta[static_cast<std::size_t>(i)];
  mixed.labels.segment(n, m).setConstant(-1.0);
  mixed.costs.head(n + m).setConstant(problem.c1);

  // c2 * max(0, delta - w^T (x_m - x_l))^2
  //   = c2 delta^2 * max(0, 1 - w^T (x_m - x_l) / delta)^2, with no bias term.
  for (Index q = 0; q < k; ++q) {
    const auto [l, r] = pairs[static_cast<std::size_t>(q)];
    mixed.rows.row(n + m + q).head(p) =
        (problem.bag.features.row(r) - problem.bag.features.row(l)) / problem.delta;
    mixed.labels(n + m + q) = 1.0;
    mixed.costs(n + m + q) = problem.c2 * problem.delta * problem.delta;
    mixed.losses[static_cast<std::size_t>(n + m + q)] = svm::Loss::kSquaredHinge;
  }

  const svm::MixedSolution sol = svm::solve_mixed(mixed, options);
  InnerResult out;
  out.w = sol.v.head(p);
  out.b = sol.v(p);
  out.objective = sol.primal_objective;
  out.trace = sol.trace;
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  return out;
}

Index count_order_violations(const Eigen::Ref<const Vector>& w, const FeatureBag& bag) {
  if (w.size() != bag.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "count_order_violations: dimension mismatch");
  }
  const Vector proj = bag.features * w;
  Index count = 0;
  for (Index l = 0; l < proj.size(); ++l) {
    for (Index m = l + 1; m < proj.size(); ++m) count += (proj(l) > proj(m));
  }
  return count;
}

mil::PoolResult pool_ordered(const FeatureBag& bag, const NegativeBag& neg,
                             const PoolingConfig& config,
                             std::vector<std::vector<double>>* traces) {
  config.validate();
  validate_pair(bag, neg);
  if (!(config.delta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "ordered pooling needs delta > 0");
  const Index n = bag.size();
  const Index required = min_positive_count(config.eta, n);
  const svm::SolveOptions options{config.solver_tol, config.max_solver_epochs};

  MilLabeling all_positive;
  all_positive.theta.assign(static_cast<std::size_t>(n), 1);
  svm::SvmProblem plain = mil::labeled_problem(bag, neg, all_positive, config.c1_init);

  Vector w;
  double b = 0.0;
  Vector scores;
  Index hits = 0;
  int rungs = 0;
  double c_used = config.c1_init;
  bool converged = true;

  for (double c : mil::c1_ladder(config)) {
    ++rungs;
    c_used = c;
    plain.c = c;
    const svm::SvmSolution unordered = svm::solve(plain, options);
    w = unordered.w;
    b = unordered.b;
    bool rung_converged = unordered.converged;

    const Vector unordered_scores = (bag.features * unordered.w).array() + unordered.b;
    std::vector<Index> selected;
    for (Index i = 0; i < n; ++i) {
      if (unordered_scores(i) >= 0.0) selected.push_back(i);
    }
    // Fewer than two selected rows means no order pairs: the rung is unordered.
    if (selected.size() >= 2 || config.ordered_solver == OrderedSolver::kGradientDescent) {
      if (selected.size() < 2) selected.clear();
      OrderedProblem problem{bag, neg, all_positive, c, config.c2, config.delta, config.eta,
                             config.pair_mode, std::move(selected)};
      if (problem.order_rows.empty()) problem.c2 = 0.0;
      const InnerResult inner =
          config.ordered_solver == OrderedSolver::kGradientDescent
              ? minimize_gradient_descent(problem, config.ordered_max_iters, config.solver_tol)
              : minimize_dual(problem, options);
      w = inner.w;
      b = inner.b;
      rung_converged = inner.converged;
      if (traces != nullptr) traces->push_back(inner.trace);
    }
    converged = converged && rung_converged;
    scores = (bag.features * w).array() + b;
    hits = (scores.array() >= 0.0).count();
    if (hits >= required) break;
  }

  mil::PoolResult result;
  result.labeling = mil::labeling_from_scores(scores, required);
  result.objective = mil::objective_p1(bag, neg, result.labeling, w, b, config.c1, config.eta);
  result.feasible = hits >= required;
  result.converged = converged;
  result.descriptor.w = w;
  result.descriptor.b = b;
  result.descriptor.meta.algorithm = Algorithm::kOrdered;
  result.descriptor.meta.iterations = rungs;
  result.descriptor.meta.c1 = c_used;
  result.descriptor.meta.objective = result.objective;
  result.descriptor.meta.eta_achieved = static_cast<double>(hits) / static_cast<double>(n);
  return result;
}

}  // namespace svmp::ordered
