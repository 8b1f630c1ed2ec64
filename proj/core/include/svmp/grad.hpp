#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svmp/core.hpp"

namespace svmp::grad {

// kStandard penalizes max(0, 1 - theta w^T z)^2. kPrinted penalizes
// max(0, theta w^T z - 1)^2, kept only so the transcribed variant can be
// exercised; its minimizer is always w = 0.
enum class LossConvention { kStandard, kPrinted };

/// Bias-free pooling layer
///   f(w) = 1/2 ||w||^2 + lambda / 2 * sum_j max(0, 1 - theta_j w^T z_j)^2
/// over inputs z (rows, positives and negatives concatenated).
struct LayerProblem {
  Matrix z;
  Vector theta;
  double lambda = 1.0;
  LossConvention convention = LossConvention::kStandard;
};

void validate(const LayerProblem& problem);

double layer_objective(const LayerProblem& problem, const Eigen::Ref<const Vector>& w);
Vector layer_gradient(const LayerProblem& problem, const Eigen::Ref<const Vector>& w);

/// Signed margin residual 1 - theta_j w^T z_j (printed convention: its negation).
/// Row j is active when the residual is positive.
Vector margin_residuals(const LayerProblem& problem, const Eigen::Ref<const Vector>& w);

/// Unique minimizer of the strictly convex layer objective: a squared-hinge
/// dual coordinate solve refined by semismooth Newton until ||grad|| <= tol.
Vector solve_layer(const LayerProblem& problem, double tol = 1e-10);

struct LayerJacobian {
  // blocks[j] = d w* / d z_j, p x p; exactly zero off the active set.
  std::vector<Eigen::MatrixXd> blocks;
  std::vector<Index> active_set;
  Eigen::MatrixXd hessian;
};

inline constexpr double kDefaultKinkTol = 1e-7;

/// Implicit-function Jacobian of the argmin:
///   H   = I + lambda * sum_{j active} theta_j^2 z_j z_j^T
///   B_j = lambda * [(theta_j^2 w^T z_j - theta_j) I + theta_j^2 z_j w^T]
///   J_j = -H^{-1} B_j
/// Throws kDegenerateMargin if any |residual_j| < kink_tol.
LayerJacobian implicit_jacobian(const LayerProblem& problem, const Eigen::Ref<const Vector>& w_star,
                                double kink_tol = kDefaultKinkTol);

/// Rows g^T J_j for every input j, from a single Cholesky solve of H; the
/// Jacobian blocks are never formed. Result is n_tot x p.
Matrix backprop_vjp(const LayerProblem& problem, const Eigen::Ref<const Vector>& w_star,
                    const Eigen::Ref<const Vector>& upstream, double kink_tol = kDefaultKinkTol);

/// Central differences of solve_layer with respect to every input entry.
std::vector<Eigen::MatrixXd> finite_difference_jacobian(const LayerProblem& problem, double h,
                                                        double solve_tol = 1e-12);

/// Largest entrywise deviation between two block lists, scaled by the largest
/// entry of the reference (floored at 1e-12).
double max_relative_error(const std::vector<Eigen::MatrixXd>& analytic,
                          const std::vector<Eigen::MatrixXd>& reference);

struct GradcheckOptions {
  std::uint64_t seed = 0;
  int instances = 20;
  double tol = 1e-3;
  double h = 1e-4;
  int max_dim = 6;
  int max_points = 12;
};

struct GradcheckCase {
  Index dim = 0;
  Index points = 0;
  Index active = 0;
  double lambda = 0.0;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckCase> cases;
  int rejected = 0;  // draws discarded by the margin filter
  bool all_passed = false;
  double worst_error = 0.0;
};

/// Seeded random instances compared against finite differences. Instances
/// with no active input, or with a margin closer than
/// 10 h max(1, ||w||) max(1, ||z_j||) to the kink, are redrawn.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace svmp::grad
