#include <benchmark/benchmark.h>

#include "qb/scenarios.hpp"
#include "qb/synth.hpp"

static void BM_GenPanel(benchmark::State& st) {
  auto spec = qb::scenarios::quasistatic_spec(1, static_cast<std::size_t>(st.range(0)));
  spec.threads = static_cast<unsigned>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(qb::gen_panel(spec));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_GenPanel)->Args({100000, 1})->Args({100000, 4})->UseRealTime()->Unit(benchmark::kMillisecond);

static void BM_SampleInitial(benchmark::State& st) {
  const qb::InitialSampler s(2.0, 0.9, 3e5, 100.0);
  qb::Engine g(1);
  for (auto _ : st) benchmark::DoNotOptimize(s(g));
}
BENCHMARK(BM_SampleInitial);

static void BM_SampleTent(benchmark::State& st) {
  qb::Engine g(1);
  for (auto _ : st) benchmark::DoNotOptimize(qb::sample_tent(31.1, 28.9, g));
}
BENCHMARK(BM_SampleTent);
