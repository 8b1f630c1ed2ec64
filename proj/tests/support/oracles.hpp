#pragma once

// Reference computations used only by tests. None of them share code with the
// library solvers.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace svmp_test {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct LinearModel {
  Vec w;
  double b = 0.0;
  double objective = 0.0;
};

// 1/2 ||w||^2 + 1/2 b^2 + c * sum loss(1 - y (w^T x + b)); squared selects the
// squared hinge.
inline double primal(const Mat& x, const Vec& y, double c, const Vec& w, double b, bool squared) {
  double loss = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double h = std::max(0.0, 1.0 - y(i) * (x.row(i).dot(w) + b));
    loss += squared ? h * h : h;
  }
  return 0.5 * (w.squaredNorm() + b * b) + c * loss;
}

// Projected subgradient on the primal. The objective is 1-strongly convex, so
// step 1/t with projection onto the ball ||(w, b)|| <= sqrt(2 c N) (which holds
// the optimum, since f(0) = c N) converges; the best iterate is returned.
// A final smooth polish handles the squared hinge exactly.
inline LinearModel subgradient_svm(const Mat& x, const Vec& y, double c, bool squared, int iters) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Mat xa(n, p + 1);
  xa << x, Vec::Ones(n);
  const double radius = std::sqrt(2.0 * c * static_cast<double>(n) * (squared ? 1.0 : 1.0));
  Vec v = Vec::Zero(p + 1);
  Vec avg = v;
  LinearModel best;
  best.w = v.head(p);
  best.b = v(p);
  best.objective = primal(x, y, c, best.w, best.b, squared);
  for (int t = 1; t <= iters; ++t) {
    Vec g = v;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double h = 1.0 - y(i) * xa.row(i).dot(v);
      if (h > 0.0) g -= (squared ? 2.0 * c * h : c) * y(i) * xa.row(i).transpose();
    }
    v -= g / static_cast<double>(t);
    const double norm = v.norm();
    if (norm > radius) v *= radius / norm;
    // Suffix averaging with weight t, which has the optimal rate for strongly
    // convex nonsmooth objectives.
    avg = avg * (static_cast<double>(t - 1) / static_cast<double>(t + 1)) + v * (2.0 / static_cast<double>(t + 1));
    for (const Vec* cand : {&v, &avg}) {
      const double f = primal(x, y, c, cand->head(p), (*cand)(p), squared);
      if (f < best.objective) {
        best.objective = f;
        best.w = cand->head(p);
        best.b = (*cand)(p);
      }
    }
  }
  return best;
}

// Accelerated projected gradient on the box-constrained dual of the hinge SVM
// with regularized bias:
//   max sum a - 1/2 || sum a_i y_i [x_i; 1] ||^2,  0 <= a_i <= c.
// Returns the primal point w = sum a_i y_i x_i (and the matching b) with its
// exact primal objective. Stops early once the duality gap is below
// gap_tol * max(1, objective).
inline LinearModel dual_pg_svm(const Mat& x, const Vec& y, double c, int iters, double gap_tol = 0.0) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Mat za(n, p + 1);
  za << x, Vec::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) za.row(i) *= y(i);
  const Mat q = za * za.transpose();
  const double lipschitz = std::max(1e-12, Eigen::SelfAdjointEigenSolver<Mat>(q).eigenvalues().maxCoeff());
  Vec a = Vec::Zero(n);
  Vec a_prev = a;
  Vec yk = a;
  double tk = 1.0;
  LinearModel best;
  best.objective = std::numeric_limits<double>::infinity();
  // Returns the duality gap at alpha.
  auto consider = [&](const Vec& alpha) {
    const Vec v = za.transpose() * alpha;
    const double f = primal(x, y, c, v.head(p), v(p), false);
    if (f < best.objective) {
      best.objective = f;
      best.w = v.head(p);
      best.b = v(p);
    }
    return f - (alpha.sum() - 0.5 * v.squaredNorm());
  };
  for (int it = 0; it < iters; ++it) {
    const Vec grad = Vec::Ones(n) - q * yk;
    a = (yk + grad / lipschitz).cwiseMax(0.0).cwiseMin(c);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    yk = a + ((tk - 1.0) / tn) * (a - a_prev);
    a_prev = a;
    tk = tn;
    if (it % 50 == 49 && consider(a) <= gap_tol * std::max(1.0, best.objective)) return best;
  }
  consider(a);
  return best;
}

// Brute force over all labelings with at least `required` positives; each
// induced SVM is re-solved with dual_pg_svm. Positives first, then negatives.
struct BruteForce {
  double objective = std::numeric_limits<double>::infinity();
  unsigned mask = 0;
};

inline BruteForce brute_force_mil(const Mat& bag, const Mat& neg, double c, int required, int iters,
                                  double gap_tol = 1e-10) {
  const auto n = static_cast<int>(bag.rows());
  Mat x(bag.rows() + neg.rows(), bag.cols());
  x << bag, neg;
  Vec y = -Vec::Ones(x.rows());
  BruteForce out;
  for (unsigned mask = 1; mask < (1U << n); ++mask) {
    int count = 0;
    for (int i = 0; i < n; ++i) {
      const bool on = (mask >> i) & 1U;
      y(i) = on ? 1.0 : -1.0;
      count += on;
    }
    if (count < required) continue;
    const double f = dual_pg_svm(x, y, c, iters, gap_tol).objective;
    if (f < out.objective) {
      out.objective = f;
      out.mask = mask;
    }
  }
  return out;
}

// Additive chi-squared kernel on scalars.
inline double chi2_kernel(double x, double y) { return (x + y) > 0.0 ? 2.0 * x * y / (x + y) : 0.0; }
inline double intersection_kernel(double x, double y) { return std::min(x, y); }

}  // namespace svmp_test
