#include "svmp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace svmp::svm {
namespace {

double loss_value(Loss loss, double margin_violation) {
  const double h = std::max(0.0, margin_violation);
  return loss == Loss::kHinge ? h : h * h;
}

MixedProblem to_mixed(const SvmProblem& problem) {
  const Index n = problem.points.rows();
  const Index p = problem.points.cols();
  MixedProblem mixed;
  mixed.rows.resize(n, p + (problem.fit_bias ? 1 : 0));
  mixed.rows.leftCols(p) = problem.points;
  if (problem.fit_bias) mixed.rows.col(p).setOnes();
  mixed.labels = problem.labels;
  mixed.costs = Vector::Constant(n, problem.c);
  if (problem.sample_weights.size() > 0) mixed.costs.array() *= problem.sample_weights.array();
  mixed.losses.assign(static_cast<std::size_t>(n), problem.loss);
  return mixed;
}

}  // namespace

void validate(const SvmProblem& problem) {
  const Index n = problem.points.rows();
  if (n == 0 || problem.points.cols() == 0) {
    throw Error(ErrorKind::kEmptyInput, "svm: problem has no points");
  }
  if (problem.labels.size() != n) {
    std::ostringstream os;
    os << "svm: " << n << " points but " << problem.labels.size() << " labels";
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if (!problem.points.allFinite()) throw Error(ErrorKind::kNonFinite, "svm: non-finite point");
  if (!std::isfinite(problem.c) || problem.c <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "svm: c must be positive and finite");
  }
  bool has_pos = false;
  bool has_neg = false;
  for (Index i = 0; i < n; ++i) {
    const double y = problem.labels(i);
    if (y == 1.0) {
      has_pos = true;
    } else if (y == -1.0) {
      has_neg = true;
    } else {
      std::ostringstream os;
      os << "svm: label " << i << " is " << y << ", expected +1 or -1";
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
  if (!has_pos || !has_neg) {
    throw Error(ErrorKind::kInvalidArgument, "svm: labels must contain both +1 and -1");
  }
  if (problem.sample_weights.size() != 0) {
    if (problem.sample_weights.size() != n) {
      throw Error(ErrorKind::kDimensionMismatch, "svm: sample_weights length differs from points");
    }
    if (!problem.sample_weights.allFinite() || (problem.sample_weights.array() <= 0.0).any()) {
      throw Error(ErrorKind::kInvalidArgument, "svm: sample weights must be positive and finite");
    }
  }
}

double mixed_objective(const MixedProblem& problem, const Eigen::Ref<const Vector>& v) {
  const Vector margins = problem.rows * v;
  double total = 0.5 * v.squaredNorm();
  for (Index i = 0; i < margins.size(); ++i) {
    total += problem.costs(i) *
             loss_value(problem.losses[static_cast<std::size_t>(i)], 1.0 - problem.labels(i) * margins(i));
  }
  return total;
}

MixedSolution solve_mixed(const MixedProblem& problem, const SolveOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::kInvalidArgument, "svm: tol must be positive");
  const Index n = problem.rows.rows();
  const Index d = problem.rows.cols();
  if (problem.labels.size() != n || problem.costs.size() != n ||
      static_cast<Index>(problem.losses.size()) != n) {
    throw Error(ErrorKind::kDimensionMismatch, "svm: row metadata lengths differ from row count");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Per-row box upper bound and diagonal shift of the dual quadratic term.
  Vector upper(n);
  Vector diag(n);
  Vector qdiag(n);
  for (Index i = 0; i < n; ++i) {
    const bool squared = problem.losses[static_cast<std::size_t>(i)] == Loss::kSquaredHinge;
    upper(i) = squared ? kInf : problem.costs(i);
    diag(i) = squared ? 0.5 / problem.costs(i) : 0.0;
    qdiag(i) = problem.rows.row(i).squaredNorm() + diag(i);
  }

  MixedSolution out;
  Vector alpha = Vector::Zero(n);
  Vector v = Vector::Zero(d);

  double best_primal = kInf;
  Vector best_v = v;
  Vector best_alpha = alpha;
  double best_dual = 0.0;

  for (int epoch = 1; epoch <= options.max_iters; ++epoch) {
    for (Index i = 0; i < n; ++i) {
      const double y = problem.labels(i);
      if (qdiag(i) <= 0.0) {
        // Zero hinge row: the dual is linear in alpha_i, so it sits at its bound.
        alpha(i) = upper(i);
        continue;
      }
      const double grad = y * problem.rows.row(i).dot(v) - 1.0 + diag(i) * alpha(i);
      const double next = std::clamp(alpha(i) - grad / qdiag(i), 0.0, upper(i));
      const double step = next - alpha(i);
      if (step != 0.0) {
        v.noalias() += (step * y) * problem.rows.row(i).transpose();
        alpha(i) = next;
      }
    }

    const double primal = mixed_objective(problem, v);
    double dual = alpha.sum() - 0.5 * v.squaredNorm();
    for (Index i = 0; i < n; ++i) {
      if (diag(i) > 0.0) dual -= 0.5 * diag(i) * alpha(i) * alpha(i);
    }
    if (primal < best_primal) {
      best_primal = primal;
      best_v = v;
      best_alpha = alpha;
      best_dual = dual;
    }
    out.trace.push_back(best_primal);
    out.iterations = epoch;

    if (primal - dual <= options.tol * std::max(1.0, primal)) {
      out.converged = true;
      out.v = v;
      out.alpha = alpha;
      out.primal_objective = primal;
      out.dual_objective = dual;
      out.duality_gap = primal - dual;
      return out;
    }
  }

  out.v = best_v;
  out.alpha = best_alpha;
  out.primal_objective = best_primal;
  // Weak duality: the final dual value is the tightest lower bound we hold.
  double dual = alpha.sum() - 0.5 * v.squaredNorm();
  for (Index i = 0; i < n; ++i) {
    if (diag(i) > 0.0) dual -= 0.5 * diag(i) * alpha(i) * alpha(i);
  }
  out.dual_objective = std::max(dual, best_dual);
  out.duality_gap = best_primal - out.dual_objective;
  return out;
}

SvmSolution solve(const SvmProblem& problem, const SolveOptions& options) {
  validate(problem);
  const MixedSolution mixed = solve_mixed(to_mixed(problem), options);
  const Index p = problem.points.cols();

  SvmSolution out;
  out.w = mixed.v.head(p);
  out.b = problem.fit_bias ? mixed.v(p) : 0.0;
  out.primal_objective = mixed.primal_objective;
  out.dual_objective = mixed.dual_objective;
  out.duality_gap = mixed.duality_gap;
  out.iterations = mixed.iterations;
  out.converged = mixed.converged;
  out.alpha = mixed.alpha;
  return out;
}

double objective(const SvmProblem& problem, const Eigen::Ref<const Vector>& w, double b) {
  if (w.size() != problem.points.cols()) {
    std::ostringstream os;
    os << "svm objective: w has length " << w.size() << " but points have dimension "
       << problem.points.cols();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if (problem.labels.size() != problem.points.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "svm objective: label count differs from points");
  }
  const Vector scores = (problem.points * w).array() + b;
  double total = 0.5 * w.squaredNorm();
  if (problem.fit_bias) total += 0.5 * b * b;
  for (Index i = 0; i < scores.size(); ++i) {
    const double weight = problem.sample_weights.size() > 0 ? problem.sample_weights(i) : 1.0;
    total += problem.c * weight * loss_value(problem.loss, 1.0 - problem.labels(i) * scores(i));
  }
  return total;
}

}  // namespace svmp::svm
