#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "svmp/core.hpp"

namespace svmp::negbag {

/// Gaussian white noise in feature space. A length-1 mean or std is
/// broadcast to `dim`; otherwise both must have length dim (dim = 0 takes
/// the length from the vectors).
struct NoiseSpec {
  Vector mean = Vector::Zero(1);
  Vector std = Vector::Ones(1);
  Index dim = 0;
  Index count = 1;
  std::uint64_t seed = 0;
};

void validate(const NoiseSpec& spec);

NegativeBag gen_noise(const NoiseSpec& spec);

/// Pooled per-dimension mean and population standard deviation over every
/// row of every bag; std is floored at kStdFloor.
inline constexpr double kStdFloor = 1e-8;
std::pair<Vector, Vector> estimate_moments(const std::vector<FeatureBag>& bags);

/// Uniform sample of `count` rows without replacement.
NegativeBag sample_corpus(const NegativeBag& corpus, Index count, std::uint64_t seed);

// max(30, n) rows per pooling call.
Index default_negative_count(Index n);

}  // namespace svmp::negbag
