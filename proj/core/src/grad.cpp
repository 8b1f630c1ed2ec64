#include "svmp/grad.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "svmp/svm.hpp"

namespace svmp::grad {
namespace {

std::vector<bool> active_mask(const Vector& residuals) {
  std::vector<bool> mask(static_cast<std::size_t>(residuals.size()));
  for (Index j = 0; j < residuals.size(); ++j) mask[static_cast<std::size_t>(j)] = residuals(j) > 0.0;
  return mask;
}

Eigen::MatrixXd hessian_for(const LayerProblem& problem, const std::vector<bool>& mask) {
  const Index p = problem.z.cols();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(p, p);
  for (Index j = 0; j < problem.z.rows(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    const double t2 = problem.theta(j) * problem.theta(j);
    h.noalias() += (problem.lambda * t2) * problem.z.row(j).transpose() * problem.z.row(j);
  }
  return h;
}

void check_w(const LayerProblem& problem, const Eigen::Ref<const Vector>& w) {
  if (w.size() != problem.z.cols()) {
    std::ostringstream os;
    os << "layer: w has length " << w.size() << " but inputs have dimension " << problem.z.cols();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
}

// Active set of w_star after rejecting near-kink configurations.
std::vector<bool> checked_active_set(const LayerProblem& problem, const Eigen::Ref<const Vector>& w_star,
                                     double kink_tol) {
  const Vector r = margin_residuals(problem, w_star);
  for (Index j = 0; j < r.size(); ++j) {
    if (std::abs(r(j)) < kink_tol) {
      std::ostringstream os;
      os << "input " << j << " lies on the margin (residual " << r(j)
         << "); the argmin is not differentiable there";
      throw Error(ErrorKind::kDegenerateMargin, os.str());
    }
  }
  return active_mask(r);
}

}  // namespace

void validate(const LayerProblem& problem) {
  if (problem.z.rows() < 1 || problem.z.cols() < 1) {
    throw Error(ErrorKind::kEmptyInput, "layer: no inputs");
  }
  if (problem.theta.size() != problem.z.rows()) {
    throw Error(ErrorKind::kDimensionMismatch, "layer: theta length differs from input count");
  }
  if (!problem.z.allFinite() || !problem.theta.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "layer: non-finite input");
  }
  if (!std::isfinite(problem.lambda) || problem.lambda <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "layer: lambda must be positive");
  }
  for (Index j = 0; j < problem.theta.size(); ++j) {
    if (problem.theta(j) != 1.0 && problem.theta(j) != -1.0) {
      throw Error(ErrorKind::kInvalidArgument, "layer: theta entries must be +1 or -1");
    }
  }
}

Vector margin_residuals(const LayerProblem& problem, const Eigen::Ref<const Vector>& w) {
  check_w(problem, w);
  const Vector signed_scores = (problem.z * w).cwiseProduct(problem.theta);
  if (problem.convention == LossConvention::kPrinted) return signed_scores.array() - 1.0;
  return 1.0 - signed_scores.array();
}

double layer_objective(const LayerProblem& problem, const Eigen::Ref<const Vector>& w) {
  const Vector r = margin_residuals(problem, w).cwiseMax(0.0);
  return 0.5 * w.squaredNorm() + 0.5 * problem.lambda * r.squaredNorm();
}

Vector layer_gradient(const LayerProblem& problem, const Eigen::Ref<const Vector>& w) {
  const Vector r = margin_residuals(problem, w).cwiseMax(0.0);
  // d/dw of r_j is -theta_j z_j (standard) or +theta_j z_j (printed).
  const double sign = problem.convention == LossConvention::kPrinted ? 1.0 : -1.0;
  return w + (sign * problem.lambda) * (problem.z.transpose() * r.cwiseProduct(problem.theta));
}

Vector solve_layer(const LayerProblem& problem, double tol) {
  validate(problem);
  const Index p = problem.z.cols();
  Vector w = Vector::Zero(p);
  const bool mixed_signs = (problem.theta.array() > 0.0).any() && (problem.theta.array() < 0.0).any();
  if (problem.convention == LossConvention::kStandard && mixed_signs) {
    svm::SvmProblem warm;
    warm.points = problem.z;
    warm.labels = problem.theta;
    warm.c = 0.5 * problem.lambda;
    warm.loss = svm::Loss::kSquaredHinge;
    warm.fit_bias = false;
    w = svm::solve(warm, {1e-8, 1000}).w;
  }

  double f = layer_objective(problem, w);
  for (int it = 0; it < 200; ++it) {
    const Vector g = layer_gradient(problem, w);
    if (g.norm() <= tol) return w;
    const Eigen::MatrixXd h = hessian_for(problem, active_mask(margin_residuals(problem, w)));
    const Vector step = h.llt().solve(-g);
    double t = 1.0;
    bool moved = false;
    while (t > 1e-16) {
      const Vector candidate = w + t * step;
      const double fc = layer_objective(problem, candidate);
      if (fc <= f + 1e-4 * t * g.dot(step)) {
        w = candidate;
        f = fc;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  if (layer_gradient(problem, w).norm() > std::max(tol, 1e-9 * (1.0 + w.norm()))) {
    throw Error(ErrorKind::kSolverFailure, "solve_layer: Newton refinement did not reach tolerance");
  }
  return w;
}

LayerJacobian implicit_jacobian(const LayerProblem& problem, const Eigen::Ref<const Vector>& w_star,
                                double kink_tol) {
  validate(problem);
  const std::vector<bool> mask = checked_active_set(problem, w_star, kink_tol);
  const Index p = problem.z.cols();

  LayerJacobian out;
  out.hessian = hessian_for(problem, mask);
  const Eigen::LLT<Eigen::MatrixXd> llt(out.hessian);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSolverFailure, "implicit_jacobian: Hessian is not positive definite");
  }
  out.blocks.assign(static_cast<std::size_t>(problem.z.rows()), Eigen::MatrixXd::Zero(p, p));
  for (Index j = 0; j < problem.z.rows(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    out.active_set.push_back(j);
    const double theta = problem.theta(j);
    const Vector zj = problem.z.row(j).transpose();
    Eigen::MatrixXd mixed = (theta * theta * w_star.dot(zj) - theta) * Eigen::MatrixXd::Identity(p, p);
    mixed.noalias() += (theta * theta) * zj * w_star.transpose();
    mixed *= problem.lambda;
    out.blocks[static_cast<std::size_t>(j)] = -llt.solve(mixed);
  }
  return out;
}

Matrix backprop_vjp(const LayerProblem& problem, const Eigen::Ref<const Vector>& w_star,
                    const Eigen::Ref<const Vector>& upstream, double kink_tol) {
  validate(problem);
  if (upstream.size() != problem.z.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "backprop_vjp: upstream gradient has the wrong length");
  }
  const std::vector<bool> mask = checked_active_set(problem, w_star, kink_tol);
  const Eigen::LLT<Eigen::MatrixXd> llt(hessian_for(problem, mask));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::kSolverFailure, "backprop_vjp: Hessian is not positive definite");
  }
  // H is symmetric, so g^T J_j = -(H^{-1} g)^T B_j = u^T B_j with u = -H^{-1} g.
  const Vector u = -llt.solve(upstream);
  Matrix out = Matrix::Zero(problem.z.rows(), problem.z.cols());
  for (Index j = 0; j < problem.z.rows(); ++j) {
    if (!mask[static_cast<std::size_t>(j)]) continue;
    const double theta = problem.theta(j);
    const auto zj = problem.z.row(j);
    const double coeff = theta * theta * w_star.dot(zj.transpose()) - theta;
    out.row(j) = problem.lambda * (coeff * u + (theta * theta * zj.dot(u)) * w_star).transpose();
  }
  return out;
}

std::vector<Eigen::MatrixXd> finite_difference_jacobian(const LayerProblem& problem, double h,
                                                        double solve_tol) {
  validate(problem);
  const Index n = problem.z.rows();
  const Index p = problem.z.cols();
  std::vector<Eigen::MatrixXd> blocks(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(p, p));
  LayerProblem probe = problem;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < p; ++k) {
      const double original = problem.z(j, k);
      probe.z(j, k) = original + h;
      const Vector plus = solve_layer(probe, solve_tol);
      probe.z(j, k) = original - h;
      const Vector minus = solve_layer(probe, solve_tol);
      probe.z(j, k) = original;
      blocks[static_cast<std::size_t>(j)].col(k) = (plus - minus) / (2.0 * h);
    }
  }
  return blocks;
}

double max_relative_error(const std::vector<Eigen::MatrixXd>& analytic,
                          const std::vector<Eigen::MatrixXd>& reference) {
  if (analytic.size() != reference.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "max_relative_error: block counts differ");
  }
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t j = 0; j < reference.size(); ++j) {
    scale = std::max(scale, reference[j].cwiseAbs().maxCoeff());
    worst = std::max(worst, (analytic[j] - reference[j]).cwiseAbs().maxCoeff());
  }
  return worst / std::max(scale, 1e-12);
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  if (options.instances < 0 || options.max_dim < 1 || options.max_points < 2 || !(options.h > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "gradcheck: invalid options");
  }
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(1, options.max_dim);
  std::uniform_int_distribution<int> count_dist(2, options.max_points);
  std::uniform_real_distribution<double> log_lambda(std::log(0.2), std::log(5.0));

  GradcheckReport report;
  const double h = options.h;
  while (static_cast<int>(report.cases.size()) < options.instances) {
    LayerProblem problem;
    const int p = dim_dist(rng);
    const int n = count_dist(rng);
    problem.z.resize(n, p);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < p; ++k) problem.z(j, k) = normal(rng);
    }
    problem.theta.resize(n);
    std::bernoulli_distribution coin(0.5);
    for (int j = 0; j < n; ++j) problem.theta(j) = coin(rng) ? 1.0 : -1.0;
    problem.theta(0) = 1.0;
    problem.theta(1) = -1.0;
    problem.lambda = std::exp(log_lambda(rng));

    const Vector w = solve_layer(problem);
    const Vector r = margin_residuals(problem, w);
    bool stable = (r.array() > 0.0).any();
    for (int j = 0; j < n && stable; ++j) {
      const double guard = 10.0 * h * std::max(1.0, w.norm()) * std::max(1.0, problem.z.row(j).norm());
      stable = std::abs(r(j)) > guard;
    }
    if (!stable) {
      if (++report.rejected > 1000 * std::max(options.instances, 1)) {
        throw Error(ErrorKind::kSolverFailure, "gradcheck: could not draw instances away from the margin");
      }
      continue;
    }
    const LayerJacobian analytic = implicit_jacobian(problem, w);
    const std::vector<Eigen::MatrixXd> numeric = finite_difference_jacobian(problem, h);

    GradcheckCase c;
    c.dim = p;
    c.points = n;
    c.active = static_cast<Index>(analytic.active_set.size());
    c.lambda = problem.lambda;
    c.max_rel_error = max_relative_error(analytic.blocks, numeric);
    c.passed = c.max_rel_error <= options.tol;
    report.worst_error = std::max(report.worst_error, c.max_rel_error);
    report.cases.push_back(c);
  }
  report.all_passed = std::all_of(report.cases.begin(), report.cases.end(),
                                  [](const GradcheckCase& c) { return c.passed; });
  return report;
}

}  // namespace svmp::grad
