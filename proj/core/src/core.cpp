#include "svmp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace svmp {
namespace {

void check_matrix(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    std::ostringstream os;
    os << what << " must have at least one row and one column (got " << m.rows() << "x"
       << m.cols() << ")";
    throw Error(ErrorKind::kEmptyInput, os.str());
  }
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (!std::isfinite(m(r, c))) {
        std::ostringstream os;
        os << what << " has a non-finite entry at row " << r << ", column " << c;
        throw Error(ErrorKind::kNonFinite, os.str());
      }
    }
  }
}

}  // namespace

void validate(const FeatureBag& bag) { check_matrix(bag.features, "feature bag"); }

void validate(const NegativeBag& neg) { check_matrix(neg.features, "negative bag"); }

void validate_pair(const FeatureBag& bag, const NegativeBag& neg) {
  validate(bag);
  validate(neg);
  if (bag.dim() != neg.dim()) {
    std::ostringstream os;
    os << "positive bag has dimension " << bag.dim() << " but negative bag has " << neg.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
}

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kEnumerate: return "enumerate";
    case Algorithm::kAlternating: return "alternating";
    case Algorithm::kParamTuning: return "param-tuning";
    case Algorithm::kOrdered: return "ordered";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "enum" || name == "enumerate") return Algorithm::kEnumerate;
  if (name == "alt" || name == "alternating") return Algorithm::kAlternating;
  if (name == "tune" || name == "param-tuning") return Algorithm::kParamTuning;
  if (name == "ordered") return Algorithm::kOrdered;
  throw Error(ErrorKind::kInvalidArgument, "unknown pooling algorithm '" + std::string(name) + "'");
}

Vector SvmpDescriptor::stacked() const {
  Vector v(w.size() + 1);
  v.head(w.size()) = w;
  v(w.size()) = b;
  return v;
}

Index MilLabeling::positives() const {
  Index count = 0;
  for (int t : theta) count += (t > 0);
  return count;
}

Index min_positive_count(double eta, Index n) {
  const double raw = eta * static_cast<double>(n);
  auto count = static_cast<Index>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<Index>(count, 0, n);
}

void PoolingConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::kInvalidArgument, "config field '" + field + "' " + why);
  };
  auto positive = [&](double v, const char* field) {
    if (!std::isfinite(v) || v <= 0.0) fail(field, "must be positive and finite");
  };
  if (!std::isfinite(eta) || eta <= 0.0 || eta > 1.0) fail("eta", "must lie in (0, 1]");
  positive(c1, "c1");
  positive(c1_init, "c1_init");
  if (!std::isfinite(c1_multiplier) || c1_multiplier <= 1.0) fail("c1_multiplier", "must exceed 1");
  positive(c1_max, "c1_max");
  if (c1_max < c1_init) fail("c1_max", "must be >= c1_init");
  if (!std::isfinite(c2) || c2 < 0.0) fail("c2", "must be nonnegative");
  if (!std::isfinite(delta) || delta < 0.0) fail("delta", "must be nonnegative");
  positive(lambda_layer, "lambda_layer");
  positive(solver_tol, "solver_tol");
  positive(convergence_threshold, "convergence_threshold");
  if (max_solver_epochs < 1) fail("max_solver_epochs", "must be >= 1");
  if (max_outer_iters < 1) fail("max_outer_iters", "must be >= 1");
  if (enumeration_cap < 1 || enumeration_cap > 24) fail("enumeration_cap", "must lie in [1, 24]");
  if (ordered_max_iters < 1) fail("ordered_max_iters", "must be >= 1");
}

double score(const SvmpDescriptor& desc, const Eigen::Ref<const Vector>& x) {
  if (x.size() != desc.w.size()) {
    std::ostringstream os;
    os << "score: descriptor has dimension " << desc.w.size() << " but input has " << x.size();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  return desc.w.dot(x) + desc.b;
}

double classified_fraction(const SvmpDescriptor& desc, const FeatureBag& bag) {
  if (bag.size() == 0) throw Error(ErrorKind::kEmptyInput, "classified_fraction: empty bag");
  if (bag.dim() != desc.w.size()) {
    std::ostringstream os;
    os << "classified_fraction: descriptor has dimension " << desc.w.size() << " but bag has "
       << bag.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  const Vector scores = bag.features * desc.w;
  Index hits = 0;
  for (Index i = 0; i < scores.size(); ++i) hits += (scores(i) + desc.b >= 0.0);
  return static_cast<double>(hits) / static_cast<double>(bag.size());
}

SvmpDescriptor normalize_descriptor(const SvmpDescriptor& desc) {
  const double norm = std::sqrt(desc.w.squaredNorm() + desc.b * desc.b);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kInvalidArgument, "normalize_descriptor: zero or non-finite descriptor");
  }
  SvmpDescriptor out = desc;
  out.w /= norm;
  out.b /= norm;
  return out;
}

}  // namespace svmp
