#include <benchmark/benchmark.h>

#include "qb/balance.hpp"
#include "qb/error.hpp"
#include "qb/fit.hpp"
#include "qb/scenarios.hpp"
#include "qb/synth.hpp"

namespace {

const qb::SynthPanel& static_panel() {
  static const auto s = qb::gen_panel(qb::scenarios::static_spec(0.14, 1));
  return s;
}

}  // namespace

static void BM_ConditionalGrowth(benchmark::State& st) {
  const auto edges = qb::linear_edges(-1.0, 1.0, 0.1);
  const auto& panel = static_panel().panel;
  for (auto _ : st) benchmark::DoNotOptimize(qb::conditional_growth_density(panel, qb::LogBinGrid{}, edges));
}
BENCHMARK(BM_ConditionalGrowth)->Unit(benchmark::kMillisecond);

static void BM_FitTentAllBins(benchmark::State& st) {
  const auto edges = qb::linear_edges(-1.0, 1.0, 0.1);
  const auto cg = qb::conditional_growth_density(static_panel().panel, qb::LogBinGrid{}, edges);
  for (auto _ : st)
    for (const auto& b : cg.bins) {
      try {
        benchmark::DoNotOptimize(qb::fit_tent(b));
      } catch (const qb::DataError&) {
      }
    }
}
BENCHMARK(BM_FitTentAllBins)->Unit(benchmark::kMicrosecond);

static void BM_FitPareto(benchmark::State& st) {
  std::vector<double> x1;
  for (const auto& p : static_panel().panel.pairs) x1.push_back(p.x1);
  const auto cfg = qb::scenarios::static_config();
  for (auto _ : st) benchmark::DoNotOptimize(qb::fit_pareto(x1, cfg.large.lo, cfg.large.hi));
}
BENCHMARK(BM_FitPareto)->Unit(benchmark::kMillisecond);

static void BM_SymmetryStatistic(benchmark::State& st) {
  const auto edges = qb::linear_edges(3.2, 7.2, 0.2);
  const auto& panel = static_panel().panel;
  for (auto _ : st) benchmark::DoNotOptimize(qb::symmetry_statistic(panel, 1.0, 0.0, edges));
}
BENCHMARK(BM_SymmetryStatistic)->Unit(benchmark::kMillisecond);
