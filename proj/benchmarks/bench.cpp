// Micro benchmarks for the numerical kernels and model fits.

#include <cstddef>
#include <vector>

#include <benchmark/benchmark.h>

#include "censbo/acquisition.hpp"
#include "censbo/censored_fit.hpp"
#include "censbo/forest.hpp"
#include "censbo/random.hpp"
#include "censbo/stats.hpp"

namespace censbo {
namespace {

std::vector<Observation> synthetic_data(std::size_t n, std::size_t dims, double censored_share) {
  const auto space = ConfigurationSpace::unit_cube(dims);
  Rng rng(11);
  std::vector<Observation> data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto theta = space.sample_uniform(rng);
    double f = 1.0;
    for (double v : theta) f += (v - 0.4) * (v - 0.4);
    const bool censored = uniform01(rng) < censored_share;
    data.push_back({std::move(theta), censored ? 0.8 * f : f, censored, 0.0});
  }
  return data;
}

void BM_TruncQuantile(benchmark::State& state) {
  const stats::TruncatedNormal d{0.0, 1.0, static_cast<double>(state.range(0))};
  double p = 0.001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::trunc_quantile(d, p));
    p = p < 0.998 ? p + 0.001 : 0.001;
  }
}
BENCHMARK(BM_TruncQuantile)->Arg(-2)->Arg(3)->Arg(20);

void BM_StratifiedSamples(benchmark::State& state) {
  const stats::TruncatedNormal d{1.0, 0.5, 1.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::stratified_samples(d, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_StratifiedSamples)->Arg(10)->Arg(1000);

void BM_ExpectedImprovement(benchmark::State& state) {
  double f_min = -10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_improvement(0.0, 1.0, f_min));
    f_min = f_min < 10.0 ? f_min + 0.01 : -10.0;
  }
}
BENCHMARK(BM_ExpectedImprovement);

void BM_FitTree(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = synthetic_data(n, 4, 0.0);
  const auto space = ConfigurationSpace::unit_cube(4);
  std::vector<Configuration> inputs;
  std::vector<double> responses;
  for (const auto& o : data) {
    inputs.push_back(o.theta);
    responses.push_back(o.y);
  }
  ForestConfig config;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_tree(space, inputs, responses, config, ++seed));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitTree)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_FitCensored(benchmark::State& state) {
  const auto data = synthetic_data(static_cast<std::size_t>(state.range(0)), 3, 0.3);
  const auto space = ConfigurationSpace::unit_cube(3);
  ForestConfig forest;
  forest.num_trees = 50;
  CensoredFitConfig fit;
  fit.kappa_max = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(fit_censored(data, space, forest, fit));
}
BENCHMARK(BM_FitCensored)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_MaximizeEi(benchmark::State& state) {
  const auto dims = static_cast<std::size_t>(state.range(0));
  const auto data = synthetic_data(300, dims, 0.0);
  const auto space = ConfigurationSpace::unit_cube(dims);
  ForestConfig forest;
  forest.num_trees = 50;
  const auto model = fit_model(data, space, forest, CensoredFitConfig{});
  AcquisitionConfig acq;
  acq.num_random_candidates = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(maximize_ei(model.forest, 1.0, space, acq));
}
BENCHMARK(BM_MaximizeEi)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace censbo

BENCHMARK_MAIN();
