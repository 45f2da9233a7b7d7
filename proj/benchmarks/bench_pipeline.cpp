#include <benchmark/benchmark.h>

#include "qb/pipeline.hpp"
#include "qb/scenarios.hpp"
#include "qb/synth.hpp"

static void BM_AnalyzePair(benchmark::State& st) {
  const auto s = qb::gen_panel(qb::scenarios::quasistatic_spec(1));
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.threads = static_cast<unsigned>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(qb::analyze_pair(s.panel, cfg));
}
BENCHMARK(BM_AnalyzePair)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
