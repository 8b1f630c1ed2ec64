#include "svmp/negbag.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace svmp::negbag {
namespace {

Index resolved_dim(const NoiseSpec& spec) {
  if (spec.dim > 0) return spec.dim;
  return std::max(spec.mean.size(), spec.std.size());
}

Vector broadcast(const Vector& v, Index dim, const char* name) {
  if (v.size() == dim) return v;
  if (v.size() == 1) return Vector::Constant(dim, v(0));
  std::ostringstream os;
  os << "noise " << name << " has length " << v.size() << ", expected 1 or " << dim;
  throw Error(ErrorKind::kDimensionMismatch, os.str());
}

}  // namespace

void validate(const NoiseSpec& spec) {
  if (spec.mean.size() < 1 || spec.std.size() < 1) {
    throw Error(ErrorKind::kEmptyInput, "noise mean and std must be nonempty");
  }
  if (spec.count < 1) throw Error(ErrorKind::kInvalidArgument, "noise count must be >= 1");
  if (spec.dim < 0) throw Error(ErrorKind::kInvalidArgument, "noise dim must be >= 0");
  const Index dim = resolved_dim(spec);
  const Vector mean = broadcast(spec.mean, dim, "mean");
  const Vector sd = broadcast(spec.std, dim, "std");
  if (!mean.allFinite() || !sd.allFinite()) {
    throw Error(ErrorKind::kNonFinite, "noise moments must be finite");
  }
  for (Index j = 0; j < dim; ++j) {
    if (!(sd(j) > 0.0)) {
      std::ostringstream os;
      os << "noise std at dimension " << j << " is " << sd(j) << "; must be positive";
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
}

NegativeBag gen_noise(const NoiseSpec& spec) {
  validate(spec);
  const Index dim = resolved_dim(spec);
  const Vector mean = broadcast(spec.mean, dim, "mean");
  const Vector sd = broadcast(spec.std, dim, "std");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  NegativeBag out;
  out.provenance = Provenance::kSyntheticNoise;
  out.features.resize(spec.count, dim);
  for (Index r = 0; r < spec.count; ++r) {
    for (Index c = 0; c < dim; ++c) out.features(r, c) = mean(c) + sd(c) * normal(rng);
  }
  return out;
}

std::pair<Vector, Vector> estimate_moments(const std::vector<FeatureBag>& bags) {
  Index rows = 0;
  Index dim = -1;
  for (const auto& bag : bags) {
    if (bag.size() == 0) continue;
    if (dim >= 0 && bag.dim() != dim) {
      throw Error(ErrorKind::kDimensionMismatch, "estimate_moments: bags differ in dimension");
    }
    dim = bag.dim();
    rows += bag.size();
  }
  if (rows == 0 || dim < 1) throw Error(ErrorKind::kEmptyInput, "estimate_moments: no rows");

  Vector mean = Vector::Zero(dim);
  for (const auto& bag : bags) {
    if (bag.size() > 0) mean += bag.features.colwise().sum().transpose();
  }
  mean /= static_cast<double>(rows);
  Vector var = Vector::Zero(dim);
  for (const auto& bag : bags) {
    if (bag.size() == 0) continue;
    var += (bag.features.rowwise() - mean.transpose()).array().square().colwise().sum().matrix().transpose();
  }
  var /= static_cast<double>(rows);
  Vector sd = var.cwiseSqrt().cwiseMax(kStdFloor);
  return {mean, sd};
}

NegativeBag sample_corpus(const NegativeBag& corpus, Index count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorKind::kInvalidArgument, "sample_corpus: count must be >= 1");
  if (count > corpus.size()) {
    std::ostringstream os;
    os << "sample_corpus: requested " << count << " rows but the corpus has " << corpus.size();
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  std::vector<Index> idx(static_cast<std::size_t>(corpus.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; the distribution object is rebuilt per draw so
  // the sequence depends only on the seed.
  for (Index k = 0; k < count; ++k) {
    std::uniform_int_distribution<Index> pick(k, corpus.size() - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  NegativeBag out;
  out.provenance = Provenance::kCorpusSample;
  out.features.resize(count, corpus.dim());
  for (Index k = 0; k < count; ++k) out.features.row(k) = corpus.features.row(idx[static_cast<std::size_t>(k)]);
  return out;
}

Index default_negative_count(Index n) { return std::max<Index>(30, n); }

}  // namespace svmp::negbag
