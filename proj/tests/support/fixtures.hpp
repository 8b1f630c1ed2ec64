#pragma once

#include <random>
#include <string>

#include "svmp/core.hpp"

namespace svmp_test {

inline svmp::Matrix gaussian(std::mt19937_64& rng, svmp::Index rows, svmp::Index cols, double mean = 0.0,
                             double sd = 1.0) {
  std::normal_distribution<double> d(mean, sd);
  svmp::Matrix m(rows, cols);
  for (svmp::Index r = 0; r < rows; ++r) {
    for (svmp::Index c = 0; c < cols; ++c) m(r, c) = d(rng);
  }
  return m;
}

inline svmp::FeatureBag random_bag(std::mt19937_64& rng, svmp::Index n, svmp::Index p, double shift = 1.0) {
  return svmp::FeatureBag{gaussian(rng, n, p, shift, 1.0), "bag"};
}

inline svmp::NegativeBag random_neg(std::mt19937_64& rng, svmp::Index m, svmp::Index p, double shift = -1.0) {
  return svmp::NegativeBag{gaussian(rng, m, p, shift, 1.0), svmp::Provenance::kSyntheticNoise};
}

}  // namespace svmp_test
