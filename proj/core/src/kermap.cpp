#include "svmp/kermap.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace svmp::kermap {
namespace {

Matrix map_matrix(const Matrix& in, const KernelMapConfig& cfg, const char* what) {
  cfg.validate();
  const Index width = cfg.output_dim_per_input();
  Matrix out(in.rows(), in.cols() * width);
  for (Index r = 0; r < in.rows(); ++r) {
    for (Index c = 0; c < in.cols(); ++c) {
      const double x = in(r, c);
      if (!(x >= 0.0)) {
        std::ostringstream os;
        os << what << " entry at row " << r << ", column " << c << " is " << x
           << "; homogeneous kernel maps need nonnegative input";
        throw Error(ErrorKind::kInvalidArgument, os.str());
      }
      out.row(r).segment(c * width, width) = map_scalar(x, cfg).transpose();
    }
  }
  return out;
}

}  // namespace

const char* to_string(Kernel kernel) {
  return kernel == Kernel::kChi2 ? "chi2" : "intersection";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "chi2") return Kernel::kChi2;
  if (name == "intersection") return Kernel::kIntersection;
  throw Error(ErrorKind::kInvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

void KernelMapConfig::validate() const {
  if (order < 1) throw Error(ErrorKind::kInvalidArgument, "kernel map order must be >= 1");
  if (!std::isfinite(period) || period <= 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "kernel map period must be positive");
  }
}

double spectrum(Kernel kernel, double lambda) {
  using std::numbers::pi;
  switch (kernel) {
    case Kernel::kChi2: return 1.0 / std::cosh(pi * lambda);
    case Kernel::kIntersection: return 2.0 / (pi * (1.0 + 4.0 * lambda * lambda));
  }
  return 0.0;
}

Vector map_scalar(double x, const KernelMapConfig& cfg) {
  cfg.validate();
  if (!(x >= 0.0)) {
    std::ostringstream os;
    os << "map_scalar: input " << x << " is negative or NaN";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  Vector out = Vector::Zero(cfg.output_dim_per_input());
  if (x == 0.0) return out;
  const double L = cfg.period;
  const double log_x = std::log(x);
  out(0) = std::sqrt(x * L * spectrum(cfg.kernel, 0.0));
  for (int j = 1; j <= cfg.order; ++j) {
    const double amp = std::sqrt(2.0 * x * L * spectrum(cfg.kernel, j * L));
    const double phase = j * L * log_x;
    out(2 * j - 1) = amp * std::cos(phase);
    out(2 * j) = amp * std::sin(phase);
  }
  return out;
}

FeatureBag map_bag(const FeatureBag& bag, const KernelMapConfig& cfg) {
  return FeatureBag{map_matrix(bag.features, cfg, "feature bag"), bag.sequence_id};
}

NegativeBag map_negative(const NegativeBag& neg, const KernelMapConfig& cfg) {
  return NegativeBag{map_matrix(neg.features, cfg, "negative bag"), neg.provenance};
}

}  // namespace svmp::kermap
