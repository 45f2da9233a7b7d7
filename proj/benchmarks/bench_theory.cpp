#include <benchmark/benchmark.h>

#include "qb/scenarios.hpp"
#include "qb/theory.hpp"

static void BM_DensityBuild(benchmark::State& st) {
  const auto p = qb::scenarios::quasistatic_params();
  for (auto _ : st) benchmark::DoNotOptimize(qb::quasistatic_density_2(p));
}
BENCHMARK(BM_DensityBuild)->Unit(benchmark::kMicrosecond);

static void BM_DensityCdf(benchmark::State& st) {
  const auto d = qb::quasistatic_density_1(qb::scenarios::quasistatic_params());
  double x = 150.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(d.cdf(x));
    x = x < 1e8 ? x * 1.01 : 150.0;
  }
}
BENCHMARK(BM_DensityCdf);

static void BM_DeResidual(benchmark::State& st) {
  const auto p = qb::scenarios::quasistatic_params();
  const auto grid = qb::log_grid(p.x_min * 1.0001, p.x0 * 100, 1000, p.x0);
  for (auto _ : st) benchmark::DoNotOptimize(qb::de_residual(p, grid));
}
BENCHMARK(BM_DeResidual)->Unit(benchmark::kMicrosecond);
