#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "svmp/kermap.hpp"

using namespace svmp;

namespace {

// Sampled-spectrum reconstruction written directly from the definition.
double reconstruction(double x, double y, kermap::Kernel kernel, int order, double period) {
  const double lambda = std::log(y / x);
  double sum = kermap::spectrum(kernel, 0.0);
  for (int j = 1; j <= order; ++j) sum += 2.0 * kermap::spectrum(kernel, j * period) * std::cos(j * period * lambda);
  return std::sqrt(x * y) * period * sum;
}

double grid_worst(kermap::Kernel kernel, int order, double period, double (*exact)(double, double)) {
  kermap::KernelMapConfig cfg{kernel, order, period};
  double worst = 0.0;
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b) {
      const double x = std::pow(10.0, -1.0 + 2.0 * a / 19.0);
      const double y = std::pow(10.0, -1.0 + 2.0 * b / 19.0);
      const double approx = kermap::map_scalar(x, cfg).dot(kermap::map_scalar(y, cfg));
      worst = std::max(worst, std::abs(approx - exact(x, y)) / exact(x, y));
    }
  }
  return worst;
}

}  // namespace

TEST(Kermap, SpectraAtZero) {
  EXPECT_DOUBLE_EQ(kermap::spectrum(kermap::Kernel::kChi2, 0.0), 1.0);
  EXPECT_NEAR(kermap::spectrum(kermap::Kernel::kIntersection, 0.0), 2.0 / std::numbers::pi, 1e-15);
  EXPECT_NEAR(kermap::spectrum(kermap::Kernel::kChi2, 1.0), 1.0 / std::cosh(std::numbers::pi), 1e-15);
}

TEST(Kermap, InnerProductIsSampledSpectrum) {
  for (auto kernel : {kermap::Kernel::kChi2, kermap::Kernel::kIntersection}) {
    kermap::KernelMapConfig cfg{kernel, 3, 0.5};
    for (double x : {0.1, 0.7, 3.0}) {
      for (double y : {0.2, 1.0, 9.0}) {
        const double dot = kermap::map_scalar(x, cfg).dot(kermap::map_scalar(y, cfg));
        EXPECT_NEAR(dot, reconstruction(x, y, kernel, 3, 0.5), 1e-12);
      }
    }
  }
}

TEST(Kermap, DiagonalWithinTruncationError) {
  kermap::KernelMapConfig cfg;
  for (double x : {0.1, 1.0, 10.0}) {
    const Vector v = kermap::map_scalar(x, cfg);
    EXPECT_NEAR(v.squaredNorm(), svmp_test::chi2_kernel(x, x), 0.02 * x);
  }
}

TEST(Kermap, DefaultPeriodCoversTheDecadeGrid) {
  EXPECT_LT(grid_worst(kermap::Kernel::kChi2, 3, 0.4, svmp_test::chi2_kernel), 0.05);
}

TEST(Kermap, IntersectionApproximation) {
  // The intersection spectrum decays slowly; three terms are coarse but bounded.
  EXPECT_LT(grid_worst(kermap::Kernel::kIntersection, 10, 0.3, svmp_test::intersection_kernel), 0.25);
}

TEST(Kermap, ZeroMapsToZero) {
  const Vector v = kermap::map_scalar(0.0, {});
  EXPECT_EQ(v.size(), 7);
  EXPECT_EQ(v.squaredNorm(), 0.0);
}

TEST(Kermap, BagShapesAndErrors) {
  FeatureBag bag{Matrix::Constant(3, 2, 0.5), "s"};
  const FeatureBag mapped = kermap::map_bag(bag, {});
  EXPECT_EQ(mapped.size(), 3);
  EXPECT_EQ(mapped.dim(), 14);
  EXPECT_EQ(mapped.sequence_id, "s");
  bag.features(2, 1) = -0.1;
  try {
    kermap::map_bag(bag, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2, column 1"), std::string::npos);
  }
  EXPECT_THROW(kermap::map_scalar(1.0, {kermap::Kernel::kChi2, 0, 0.5}), Error);
  EXPECT_THROW(kermap::map_scalar(1.0, {kermap::Kernel::kChi2, 3, -1.0}), Error);
  EXPECT_EQ(kermap::parse_kernel("chi2"), kermap::Kernel::kChi2);
  EXPECT_THROW(kermap::parse_kernel("rbf"), Error);
}
