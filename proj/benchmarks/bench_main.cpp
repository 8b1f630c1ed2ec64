#include <random>

#include <benchmark/benchmark.h>

#include "svmp/grad.hpp"
#include "svmp/kermap.hpp"
#include "svmp/mil.hpp"
#include "svmp/negbag.hpp"
#include "svmp/ordered.hpp"
#include "svmp/pipeline.hpp"
#include "svmp/svm.hpp"

using namespace svmp;

namespace {

Matrix gaussian(std::mt19937_64& rng, Index rows, Index cols, double mean = 0.0) {
  std::normal_distribution<double> d(mean, 1.0);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) m(r, c) = d(rng);
  }
  return m;
}

struct Fixture {
  pipeline::SyntheticDataset data;
  NegativeBag neg;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.data = pipeline::make_synthetic(pipeline::SyntheticSpec{});
    const auto [mean, sd] = negbag::estimate_moments(out.data.bags);
    negbag::NoiseSpec noise;
    noise.mean = mean;
    noise.std = sd;
    noise.count = 50;
    out.neg = negbag::gen_noise(noise);
    return out;
  }();
  return f;
}

void BM_SvmSolve(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Index n = state.range(0);
  svm::SvmProblem prob;
  prob.points = gaussian(rng, n, 64);
  prob.labels.resize(n);
  for (Index i = 0; i < n; ++i) {
    prob.labels(i) = i % 2 == 0 ? 1.0 : -1.0;
    prob.points.row(i).array() += 0.3 * prob.labels(i);
  }
  prob.c = 1.0;
  prob.loss = state.range(1) ? svm::Loss::kSquaredHinge : svm::Loss::kHinge;
  for (auto _ : state) benchmark::DoNotOptimize(svm::solve(prob));
}
BENCHMARK(BM_SvmSolve)->ArgsProduct({{100, 1000}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Pool(benchmark::State& state) {
  const auto& f = fixture();
  const auto algo = static_cast<Algorithm>(state.range(0));
  PoolingConfig cfg;
  cfg.eta = 0.2;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pipeline::pool_bag(f.data.bags[i % f.data.bags.size()], f.neg, cfg, algo));
    ++i;
  }
  state.SetLabel(to_string(algo));
}
BENCHMARK(BM_Pool)
    ->Arg(static_cast<int>(Algorithm::kParamTuning))
    ->Arg(static_cast<int>(Algorithm::kAlternating))
    ->Arg(static_cast<int>(Algorithm::kOrdered))
    ->Unit(benchmark::kMillisecond);

void BM_Enumerate(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const FeatureBag bag{gaussian(rng, state.range(0), 4, 0.5), "bag"};
  const NegativeBag neg{gaussian(rng, 12, 4, -0.5), Provenance::kSyntheticNoise};
  PoolingConfig cfg;
  cfg.eta = 0.5;
  for (auto _ : state) benchmark::DoNotOptimize(mil::pool_enumerate(bag, neg, cfg));
}
BENCHMARK(BM_Enumerate)->DenseRange(6, 12, 3)->Unit(benchmark::kMillisecond);

void BM_KernelMapBag(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const FeatureBag bag{gaussian(rng, 50, 64).cwiseAbs(), "bag"};
  const kermap::KernelMapConfig cfg{kermap::Kernel::kChi2, static_cast<int>(state.range(0)), 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(kermap::map_bag(bag, cfg));
}
BENCHMARK(BM_KernelMapBag)->Arg(1)->Arg(3)->Unit(benchmark::kMicrosecond);

void BM_ImplicitJacobian(benchmark::State& state) {
  std::mt19937_64 rng(4);
  grad::LayerProblem prob;
  prob.z = gaussian(rng, 12, 6);
  prob.theta.resize(12);
  for (Index j = 0; j < 12; ++j) prob.theta(j) = j % 3 == 0 ? -1.0 : 1.0;
  prob.lambda = 1.0;
  const Vector w = grad::solve_layer(prob);
  const Vector g = Vector::Ones(6);
  for (auto _ : state) {
    if (state.range(0) == 0) {
      benchmark::DoNotOptimize(grad::implicit_jacobian(prob, w));
    } else {
      benchmark::DoNotOptimize(grad::backprop_vjp(prob, w, g));
    }
  }
  state.SetLabel(state.range(0) == 0 ? "dense" : "vjp");
}
BENCHMARK(BM_ImplicitJacobian)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
