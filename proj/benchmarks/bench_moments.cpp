#include <benchmark/benchmark.h>

#include "emco/moments.hpp"
#include "emco/simulate.hpp"

using namespace emco;

namespace {

SimDraw make_draw(std::size_t n) {
  SimConfig cfg = SimConfig::uniform_noncompliers(0.1, 0.1, 0.05, 0.2);
  cfg.n_obs = n;
  cfg.seed = 17;
  return simulate_dataset(cfg, 0);
}

void BM_BuildMoments(benchmark::State& state) {
  const SimDraw draw = make_draw(static_cast<std::size_t>(state.range(0)));
  const std::vector<OutcomeSet> partition = quantile_partition(draw.data, 10);
  for (auto _ : state) {
    MomentSet ms = build_emco_moments(draw.data, partition);
    benchmark::DoNotOptimize(ms);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BuildMoments)->Arg(1000)->Arg(100000);

void BM_QuantilePartition(benchmark::State& state) {
  const SimDraw draw = make_draw(100000);
  for (auto _ : state) {
    auto partition = quantile_partition(draw.data, 10);
    benchmark::DoNotOptimize(partition);
  }
}
BENCHMARK(BM_QuantilePartition);

void BM_SimulateDataset(benchmark::State& state) {
  SimConfig cfg = SimConfig::uniform_noncompliers(0.1, 0.1, 0.05, 0.2);
  cfg.n_obs = static_cast<std::size_t>(state.range(0));
  cfg.seed = 17;
  std::uint64_t draw = 0;
  for (auto _ : state) {
    SimDraw out = simulate_dataset(cfg, draw++);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateDataset)->Arg(1000)->Arg(1000000);

}  // namespace

BENCHMARK_MAIN();
