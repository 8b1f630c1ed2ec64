#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svmp/core.hpp"
#include "svmp/kermap.hpp"
#include "svmp/mil.hpp"

namespace svmp::pipeline {

Vector avg_pool(const FeatureBag& bag);
Vector max_pool(const FeatureBag& bag);

enum class Baseline { kAvg, kMax };
const char* to_string(Baseline method);
Baseline parse_baseline(std::string_view name);

/// Rows are descriptors in input order; labels are class ids in 1..d and
/// class_names[k - 1] names class k.
struct LabeledDescriptorSet {
  Matrix descriptors;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> sequence_ids;

  Index size() const { return descriptors.rows(); }
  Index dim() const { return descriptors.cols(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }
};

void validate(const LabeledDescriptorSet& set);

/// Maps arbitrary nonnegative labels to ids 1..d in increasing label order.
/// class_names are the original labels in decimal.
std::pair<std::vector<int>, std::vector<std::string>> remap_labels(const std::vector<long long>& raw);

struct BagRecord {
  std::string sequence_id;
  bool ok = false;  // false when pooling threw; `error` then holds the message
  bool feasible = false;
  double objective = 0.0;
  int iterations = 0;
  double eta_achieved = 0.0;
  std::string error;
};

struct PoolOptions {
  Algorithm algorithm = Algorithm::kParamTuning;
  std::optional<kermap::KernelMapConfig> kernel;
  int jobs = 1;
};

struct PoolDatasetResult {
  // Only bags that pooled without error, in input order.
  LabeledDescriptorSet set;
  // One record per input bag, in input order.
  std::vector<BagRecord> records;
};

/// Pools a single bag with the chosen algorithm (no kernel map, no normalization).
mil::PoolResult pool_bag(const FeatureBag& bag, const NegativeBag& neg, const PoolingConfig& config,
                         Algorithm algorithm);

/// Pools every bag; a bag that throws is recorded and skipped. Throws
/// kSolverFailure only when every bag fails. Results do not depend on jobs.
PoolDatasetResult pool_dataset(const std::vector<FeatureBag>& bags, const std::vector<int>& labels,
                               const std::vector<std::string>& class_names, const NegativeBag& neg,
                               const PoolingConfig& config, const PoolOptions& options = {});

/// Baseline descriptors [pool(bag); 1], optionally scaled to unit norm.
LabeledDescriptorSet baseline_dataset(const std::vector<FeatureBag>& bags, const std::vector<int>& labels,
                                      const std::vector<std::string>& class_names, Baseline method,
                                      bool normalize = true);

/// Column-wise concatenation of two descriptor sets over the same sequences.
LabeledDescriptorSet concatenate(const LabeledDescriptorSet& a, const LabeledDescriptorSet& b);

LabeledDescriptorSet subset(const LabeledDescriptorSet& set, const std::vector<Index>& rows);

struct MulticlassModel {
  Matrix weights;  // d x dim, one row per class
  Vector biases;
  std::vector<std::string> class_names;

  int num_classes() const { return static_cast<int>(weights.rows()); }
  Index dim() const { return weights.cols(); }
};

/// One-vs-rest hinge-loss linear SVMs, trained concurrently when jobs > 1.
MulticlassModel train_classifier(const LabeledDescriptorSet& set, double c, int jobs = 1);

/// Argmax of class scores; ties go to the lowest class id.
int predict(const MulticlassModel& model, const Eigen::Ref<const Vector>& descriptor);

struct Evaluation {
  double accuracy = 0.0;
  // confusion(t - 1, p - 1) counts samples of true class t predicted as p.
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> confusion;
  Index correct = 0;
  Index total = 0;
};

Evaluation evaluate(const MulticlassModel& model, const LabeledDescriptorSet& set);

struct SyntheticSpec {
  int classes = 5;
  int sequences_per_class = 40;
  int n_frames = 50;
  int p = 64;
  double signal_fraction = 0.2;
  double noise_std = 1.0;
  std::uint64_t seed = 0;
  // Signal frames sit at signal_strength * noise_std along the class direction.
  double signal_strength = 12.0;
  // Background frames are N(0, (background_scale * noise_std)^2), each frame
  // rescaled by exp(background_tail * N(0, 1)).
  double background_scale = 2.0;
  double background_tail = 1.2;

  void validate() const;
};

struct SyntheticDataset {
  std::vector<FeatureBag> bags;
  std::vector<int> labels;  // 1..classes
  std::vector<std::string> class_names;
  Matrix directions;  // classes x p, unit rows
};

/// Each class owns a random unit direction u_k. round(signal_fraction * n)
/// frames per sequence, at random positions, are signal_strength * sigma * u_k
/// plus N(0, sigma^2) noise, redrawn until their projection on u_k is at
/// least 3 sigma. The remaining frames come from a class-independent
/// heavy-tailed background.
SyntheticDataset make_synthetic(const SyntheticSpec& spec);

/// Stratified split: per class, a seeded shuffle puts round(train_fraction *
/// count) sequences in the training part. Both parts are in ascending order.
std::pair<std::vector<Index>, std::vector<Index>> stratified_split(const std::vector<int>& labels,
                                                                   double train_fraction,
                                                                   std::uint64_t seed);

}  // namespace svmp::pipeline
