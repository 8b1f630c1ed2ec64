#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "svmp/error.hpp"

namespace svmp {

using Index = Eigen::Index;
// Rows are frames (or negatives); row-major keeps a frame contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// One sequence: n frame features of dimension p, rows in temporal order.
struct FeatureBag {
  Matrix features;
  std::string sequence_id;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

enum class Provenance { kSyntheticNoise, kCorpusSample };

/// Features known to be irrelevant. Negative sequences are flattened into
/// individual rows; only per-row labels matter to the max-margin problem.
struct NegativeBag {
  Matrix features;
  Provenance provenance = Provenance::kSyntheticNoise;

  Index size() const { return features.rows(); }
  Index dim() const { return features.cols(); }
};

// Throw Error on empty shape or non-finite entries.
void validate(const FeatureBag& bag);
void validate(const NegativeBag& neg);
// Also checks that the two share a feature dimension.
void validate_pair(const FeatureBag& bag, const NegativeBag& neg);

enum class Algorithm { kEnumerate, kAlternating, kParamTuning, kOrdered };

const char* to_string(Algorithm algorithm);
// Accepts the short CLI names (enum, alt, tune, ordered) and long names.
Algorithm parse_algorithm(std::string_view name);

struct DescriptorMeta {
  double eta_achieved = 0.0;
  double objective = 0.0;
  Algorithm algorithm = Algorithm::kParamTuning;
  int iterations = 0;
  // Regularization weight of the final solve (the tuned value for the ladder).
  double c1 = 0.0;
};

/// The pooled representation of a sequence: hyperplane (w, b).
struct SvmpDescriptor {
  Vector w;
  double b = 0.0;
  DescriptorMeta meta;

  Index dim() const { return w.size(); }
  // [w; b] as one vector of length p + 1.
  Vector stacked() const;
};

/// +1 / -1 label per positive-bag row. +1 rows form the selected subset.
struct MilLabeling {
  std::vector<int> theta;

  Index size() const { return static_cast<Index>(theta.size()); }
  Index positives() const;
};

// Minimum number of +1 labels for a bag of n rows: ceil(eta * n), computed
// with a small guard so that e.g. 0.7 * 10 yields 7 rather than 8.
Index min_positive_count(double eta, Index n);

enum class PairMode { kAllPairs, kConsecutive };

// Inner solver used by ordered pooling.
enum class OrderedSolver { kDualCoordinate, kGradientDescent };

struct PoolingConfig {
  double eta = 0.9;
  double c1 = 10.0;
  double c1_init = 1e-4;
  double c1_multiplier = 10.0;
  double c1_max = 1e4;
  double c2 = 1.0;
  double delta = 1.0;
  double lambda_layer = 1.0;
  double solver_tol = 1e-6;
  int max_solver_epochs = 10000;
  int max_outer_iters = 50;
  double convergence_threshold = 1e-4;
  int enumeration_cap = 16;
  int ordered_max_iters = 2000;
  PairMode pair_mode = PairMode::kAllPairs;
  OrderedSolver ordered_solver = OrderedSolver::kDualCoordinate;
  bool normalize_descriptor = true;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument naming the first offending field.
  void validate() const;
};

/// w^T x + b, no thresholding.
double score(const SvmpDescriptor& desc, const Eigen::Ref<const Vector>& x);

/// Fraction of bag rows with score >= 0.
double classified_fraction(const SvmpDescriptor& desc, const FeatureBag& bag);

/// Scales (w, b) so that ||[w; b]||_2 = 1. Meta is carried over unchanged.
SvmpDescriptor normalize_descriptor(const SvmpDescriptor& desc);

}  // namespace svmp
