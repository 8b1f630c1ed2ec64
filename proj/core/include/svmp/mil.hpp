#pragma once

#include <vector>

#include "svmp/core.hpp"
#include "svmp/svm.hpp"

namespace svmp::mil {

struct PoolResult {
  SvmpDescriptor descriptor;
  MilLabeling labeling;
  bool feasible = false;
  // Multiple-instance objective at config.c1 for (descriptor, labeling), so
  // results of different algorithms are directly comparable.
  double objective = 0.0;
  // False when an iteration cap stopped the algorithm.
  bool converged = true;
};

/// The SVM induced by a labeling: positive-bag rows carry theta, negative
/// rows carry -1. Rows are stacked positives first.
svm::SvmProblem labeled_problem(const FeatureBag& bag, const NegativeBag& neg,
                                const MilLabeling& labeling, double c1);

/// Hinge form of the multiple-instance objective
///   1/2 ||w||^2 + 1/2 b^2 + c1 * [sum_pos max(0, 1 - theta (w^T x + b))
///                                 + sum_neg max(0, 1 + (w^T x + b))].
/// Throws kInfeasibleLabeling if theta has fewer than ceil(eta * n) positives.
double objective_p1(const FeatureBag& bag, const NegativeBag& neg, const MilLabeling& labeling,
                    const Eigen::Ref<const Vector>& w, double b, double c1, double eta);

/// Labeling with exactly `count` positives: the rows whose flip from -1 to +1
/// reduces the hinge objective the most with (w, b) frozen. Ties go to the
/// lower index.
MilLabeling select_top_reductions(const Eigen::Ref<const Vector>& scores, Index count);

/// Exhaustive search over every subset of at least ceil(eta * n) positives.
/// descriptor.meta.iterations holds the number of subsets solved.
PoolResult pool_enumerate(const FeatureBag& bag, const NegativeBag& neg,
                          const PoolingConfig& config);

/// Alternates an SVM solve with fixed labels and a top-R relabeling with
/// fixed (w, b), until the objective drops by less than
/// config.convergence_threshold between outer iterations.
PoolResult pool_alternating(const FeatureBag& bag, const NegativeBag& neg,
                            const PoolingConfig& config);

/// Geometric C1 ladder c1_init, c1_init * m, ... up to c1_max inclusive.
std::vector<double> c1_ladder(const PoolingConfig& config);

/// Labeling derived from scores: score >= 0 gives +1; if that leaves fewer
/// than `min_count` positives, the highest-scoring rows are promoted.
MilLabeling labeling_from_scores(const Eigen::Ref<const Vector>& scores, Index min_count);

/// Walks the C1 ladder with every positive labeled +1 and stops at the first
/// rung where at least an eta fraction of the bag scores >= 0.
PoolResult pool_param_tuning(const FeatureBag& bag, const NegativeBag& neg,
                             const PoolingConfig& config);

}  // namespace svmp::mil
