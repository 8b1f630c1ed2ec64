#pragma once

#include <vector>

#include "svmp/core.hpp"

namespace svmp::svm {

enum class Loss { kHinge, kSquaredHinge };

/// Binary linear SVM:
///   min 1/2 ||w||^2 [+ 1/2 b^2] + c * sum_i s_i * loss(1 - y_i (w^T x_i + b))
/// The bias is fit by augmenting each point with a constant 1 feature, so it is
/// regularized together with w. s_i are optional per-sample weights (default 1).
struct SvmProblem {
  Matrix points;
  Vector labels;  // each entry exactly +1 or -1
  double c = 1.0;
  Loss loss = Loss::kHinge;
  bool fit_bias = true;
  Vector sample_weights;  // empty means all ones
};

void validate(const SvmProblem& problem);

struct SolveOptions {
  double tol = 1e-6;
  int max_iters = 10000;  // epochs over the data
};

struct SvmSolution {
  Vector w;
  double b = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  Vector alpha;  // dual variables, one per point
};

/// Dual coordinate descent with a fixed cyclic order. Stops once
/// duality_gap <= tol * max(1, primal_objective) or after max_iters epochs,
/// in which case the best primal iterate seen is returned.
SvmSolution solve(const SvmProblem& problem, const SolveOptions& options = {});

/// Exact primal value of (w, b) for the problem, with the same bias convention
/// as solve(): b^2 / 2 is included when fit_bias is set.
double objective(const SvmProblem& problem, const Eigen::Ref<const Vector>& w, double b);

/// Loss-agnostic problem consumed by the dual coordinate engine. Rows are used
/// as given (callers do their own bias augmentation), and each row carries its
/// own cost and loss. The primal is
///   1/2 ||v||^2 + sum_i cost_i * loss_i(1 - y_i v^T a_i).
struct MixedProblem {
  Matrix rows;
  Vector labels;
  Vector costs;
  std::vector<Loss> losses;
};

struct MixedSolution {
  Vector v;
  Vector alpha;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
  bool converged = false;
  // Primal value of the best iterate after each epoch; non-increasing.
  std::vector<double> trace;
};

MixedSolution solve_mixed(const MixedProblem& problem, const SolveOptions& options = {});

double mixed_objective(const MixedProblem& problem, const Eigen::Ref<const Vector>& v);

}  // namespace svmp::svm
