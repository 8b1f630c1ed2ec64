#include "svmp/mil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace svmp::mil {
namespace {

svm::SolveOptions solve_options(const PoolingConfig& config) {
  return {config.solver_tol, config.max_solver_epochs};
}

void check_labeling(const FeatureBag& bag, const MilLabeling& labeling) {
  if (labeling.size() != bag.size()) {
    std::ostringstream os;
    os << "labeling has " << labeling.size() << " entries for a bag of " << bag.size() << " rows";
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  for (int t : labeling.theta) {
    if (t != 1 && t != -1) throw Error(ErrorKind::kInvalidArgument, "labeling entries must be +1 or -1");
  }
}


PoolResult finish(const FeatureBag& bag, const NegativeBag& neg, const PoolingConfig& config,
                  Algorithm algorithm, const Vector& w, double b, MilLabeling labeling,
                  int iterations, double c1_used, bool converged) {
  PoolResult result;
  result.descriptor.w = w;
  result.descriptor.b = b;
  result.descriptor.meta.algorithm = algorithm;
  result.descriptor.meta.iterations = iterations;
  result.descriptor.meta.c1 = c1_used;
  result.objective = objective_p1(bag, neg, labeling, w, b, config.c1, config.eta);
  result.descriptor.meta.objective = result.objective;
  result.labeling = std::move(labeling);
  result.converged = converged;
  return result;
}

}  // namespace

svm::SvmProblem labeled_problem(const FeatureBag& bag, const NegativeBag& neg,
                                const MilLabeling& labeling, double c1) {
  validate_pair(bag, neg);
  check_labeling(bag, labeling);
  const Index n = bag.size();
  const Index m = neg.size();
  svm::SvmProblem problem;
  problem.points.resize(n + m, bag.dim());
  problem.points.topRows(n) = bag.features;
  problem.points.bottomRows(m) = neg.features;
  problem.labels.resize(n + m);
  for (Index i = 0; i < n; ++i) problem.labels(i) = labeling.theta[static_cast<std::size_t>(i)];
  problem.labels.tail(m).setConstant(-1.0);
  problem.c = c1;
  problem.loss = svm::Loss::kHinge;
  problem.fit_bias = true;
  return problem;
}

double objective_p1(const FeatureBag& bag, const NegativeBag& neg, const MilLabeling& labeling,
                    const Eigen::Ref<const Vector>& w, double b, double c1, double eta) {
  check_labeling(bag, labeling);
  const Index required = min_positive_count(eta, bag.size());
  if (labeling.positives() < required) {
    std::ostringstream os;
    os << "labeling selects " << labeling.positives() << " rows but eta=" << eta << " requires "
       << required;
    throw Error(ErrorKind::kInfeasibleLabeling, os.str());
  }
  if (w.size() != bag.dim() || neg.dim() != bag.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "objective_p1: dimensions disagree");
  }
  double loss = 0.0;
  for (Index i = 0; i < bag.size(); ++i) {
    const double s = bag.features.row(i).dot(w) + b;
    loss += std::max(0.0, 1.0 - labeling.theta[static_cast<std::size_t>(i)] * s);
  }
  for (Index i = 0; i < neg.size(); ++i) {
    const double s = neg.features.row(i).dot(w) + b;
    loss += std::max(0.0, 1.0 + s);
  }
  return 0.5 * (w.squaredNorm() + b * b) + c1 * loss;
}

MilLabeling select_top_reductions(const Eigen::Ref<const Vector>& scores, Index count) {
  const Index n = scores.size();
  if (count < 0 || count > n) throw Error(ErrorKind::kInvalidArgument, "select_top_reductions: bad count");
  // Flipping row i from -1 to +1 changes its hinge term from max(0, 1 + s)
  // to max(0, 1 - s); the reduction is the difference.
  std::vector<double> reduction(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double s = scores(i);
    reduction[static_cast<std::size_t>(i)] = std::max(0.0, 1.0 + s) - std::max(0.0, 1.0 - s);
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return reduction[static_cast<std::size_t>(a)] > reduction[static_cast<std::size_t>(b)];
  });
  MilLabeling labeling;
  labeling.theta.assign(static_cast<std::size_t>(n), -1);
  for (Index k = 0; k < count; ++k) labeling.theta[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  return labeling;
}

PoolResult pool_enumerate(const FeatureBag& bag, const NegativeBag& neg,
                          const PoolingConfig& config) {
  config.validate();
  validate_pair(bag, neg);
  const Index n = bag.size();
  if (n > config.enumeration_cap) {
    std::ostringstream os;
    os << "enumeration over " << n << " rows exceeds the cap of " << config.enumeration_cap
       << "; use the alternating or param-tuning algorithm";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const Index required = min_positive_count(config.eta, n);

  MilLabeling labeling;
  labeling.theta.assign(static_cast<std::size_t>(n), -1);
  svm::SvmProblem problem = labeled_problem(bag, neg, labeling, config.c1);

  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<Index> best_set;
  Vector best_w;
  double best_b = 0.0;
  bool all_converged = true;
  int evaluated = 0;

  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    if (static_cast<Index>(std::popcount(mask)) < required) continue;
    std::vector<Index> set;
    for (Index i = 0; i < n; ++i) {
      const bool on = (mask >> i) & 1U;
      problem.labels(i) = on ? 1.0 : -1.0;
      if (on) set.push_back(i);
    }
    const svm::SvmSolution sol = svm::solve(problem, solve_options(config));
    all_converged = all_converged && sol.converged;
    ++evaluated;
    const double obj = sol.primal_objective;
    const double tie = best_set.empty() ? 0.0 : 1e-9 * std::max(1.0, std::abs(best_obj));
    const bool better = best_set.empty() || obj < best_obj - tie;
    const bool tied = !better && std::abs(obj - best_obj) <= tie;
    if (better || (tied && std::lexicographical_compare(set.begin(), set.end(), best_set.begin(),
                                                        best_set.end()))) {
      best_obj = obj;
      best_set = std::move(set);
      best_w = sol.w;
      best_b = sol.b;
    }
  }

  for (Index i : best_set) labeling.theta[static_cast<std::size_t>(i)] = 1;
  PoolResult result = finish(bag, neg, config, Algorithm::kEnumerate, best_w, best_b,
                             std::move(labeling), evaluated, config.c1, all_converged);
  result.feasible = result.labeling.positives() >= required;
  result.descriptor.meta.eta_achieved =
      static_cast<double>(result.labeling.positives()) / static_cast<double>(n);
  return result;
}

PoolResult pool_alternating(const FeatureBag& bag, const NegativeBag& neg,
                            const PoolingConfig& config) {
  config.validate();
  validate_pair(bag, neg);
  const Index n = bag.size();
  const Index required = min_positive_count(config.eta, n);

  // Initial labels: the R rows projecting highest onto the difference of the
  // bag and negative means.
  const Vector direction = (bag.features.colwise().mean() - neg.features.colwise().mean()).transpose();
  const Vector projection = bag.features * direction;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return projection(a) > projection(b); });
  MilLabeling labeling;
  labeling.theta.assign(static_cast<std::size_t>(n), -1);
  for (Index k = 0; k < required; ++k) labeling.theta[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;
  svm::SvmProblem problem = labeled_problem(bag, neg, labeling, config.c1);
  svm::SvmSolution sol;
  auto relabel = [&](const svm::SvmSolution& s) {
    const Vector scores = (bag.features * s.w).array() + s.b;
    return select_top_reductions(scores, required);
  };

  double previous = std::numeric_limits<double>::infinity();
  double best_obj = std::numeric_limits<double>::infinity();
  Vector best_w;
  double best_b = 0.0;
  MilLabeling best_labeling;
  bool converged = false;
  int iterations = 0;

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    iterations = it;
    for (Index i = 0; i < n; ++i) problem.labels(i) = labeling.theta[static_cast<std::size_t>(i)];
    sol = svm::solve(problem, solve_options(config));
    const double obj = objective_p1(bag, neg, labeling, sol.w, sol.b, config.c1, config.eta);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = sol.w;
      best_b = sol.b;
      best_labeling = labeling;
    }
    if (previous - obj < config.convergence_threshold) {
      converged = true;
      break;
    }
    previous = obj;
    labeling = relabel(sol);
  }

  PoolResult result = finish(bag, neg, config, Algorithm::kAlternating, best_w, best_b,
                             std::move(best_labeling), iterations, config.c1, converged);
  result.feasible = result.labeling.positives() >= required;
  result.descriptor.meta.eta_achieved =
      static_cast<double>(result.labeling.positives()) / static_cast<double>(n);
  return result;
}

std::vector<double> c1_ladder(const PoolingConfig& config) {
  config.validate();
  std::vector<double> rungs;
  const double limit = config.c1_max * (1.0 + 1e-12);
  for (int k = 0;; ++k) {
    const double c = config.c1_init * std::pow(config.c1_multiplier, k);
    if (c > limit) break;
    rungs.push_back(c);
  }
  return rungs;
}

MilLabeling labeling_from_scores(const Eigen::Ref<const Vector>& scores, Index min_count) {
  const Index n = scores.size();
  MilLabeling labeling;
  labeling.theta.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labeling.theta[static_cast<std::size_t>(i)] = scores(i) >= 0.0 ? 1 : -1;
  Index have = labeling.positives();
  if (have >= min_count) return labeling;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  for (Index i : order) {
    if (have >= min_count) break;
    int& t = labeling.theta[static_cast<std::size_t>(i)];
    if (t < 0) {
      t = 1;
      ++have;
    }
  }
  return labeling;
}

PoolResult pool_param_tuning(const FeatureBag& bag, const NegativeBag& neg,
                             const PoolingConfig& config) {
  config.validate();
  validate_pair(bag, neg);
  const Index n = bag.size();
  const Index required = min_positive_count(config.eta, n);

  MilLabeling all_positive;
  all_positive.theta.assign(static_cast<std::size_t>(n), 1);
  svm::SvmProblem problem = labeled_problem(bag, neg, all_positive, config.c1_init);

  svm::SvmSolution sol;
  Vector scores;
  Index hits = 0;
  int rungs = 0;
  double c_used = config.c1_init;
  bool converged = true;
  for (double c : c1_ladder(config)) {
    problem.c = c;
    sol = svm::solve(problem, solve_options(config));
    converged = converged && sol.converged;
    ++rungs;
    c_used = c;
    scores = (bag.features * sol.w).array() + sol.b;
    hits = (scores.array() >= 0.0).count();
    if (hits >= required) break;
  }

  PoolResult result = finish(bag, neg, config, Algorithm::kParamTuning, sol.w, sol.b,
                             labeling_from_scores(scores, required), rungs, c_used, converged);
  result.feasible = hits >= required;
  result.descriptor.meta.eta_achieved = static_cast<double>(hits) / static_cast<double>(n);
  return result;
}

}  // namespace svmp::mil
