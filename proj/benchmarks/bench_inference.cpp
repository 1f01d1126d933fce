#include <benchmark/benchmark.h>

#include "emco/inference.hpp"
#include "emco/moments.hpp"
#include "emco/simulate.hpp"

using namespace emco;

namespace {

MomentSet desk_scale_moments() {
  SimConfig cfg = SimConfig::uniform_noncompliers(0.1, 0.1, 0.05, 0.2);
  cfg.n_obs = 1000;
  cfg.seed = 23;
  const SimDraw draw = simulate_dataset(cfg, 0);
  return build_emco_moments(draw.data, quantile_partition(draw.data, 10));
}

void BM_BootstrapMax(benchmark::State& state) {
  const MomentSet ms = desk_scale_moments();
  std::vector<double> centering;
  for (const Moment& m : ms.moments) centering.push_back(m.mean);
  for (auto _ : state) {
    auto q = bootstrap_max_distribution(ms, centering,
                                        static_cast<std::size_t>(state.range(0)),
                                        99, 1);
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_BootstrapMax)->Arg(100)->Arg(500);

void BM_RswTest(benchmark::State& state) {
  const MomentSet ms = desk_scale_moments();
  for (auto _ : state) {
    TestResult res = rsw_test(ms, 0.05, 500, 0.005, 7, 1);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_RswTest);

void BM_CckTest(benchmark::State& state) {
  const MomentSet ms = desk_scale_moments();
  for (auto _ : state) {
    TestResult res = cck_test(ms, 0.05, 500, 0.005, 7, 1);
    benchmark::DoNotOptimize(res);
  }
}
BENCHMARK(BM_CckTest);

}  // namespace

BENCHMARK_MAIN();
