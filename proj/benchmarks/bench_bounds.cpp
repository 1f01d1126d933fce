#include <benchmark/benchmark.h>

#include "emco/bounds.hpp"
#include "emco/rng.hpp"

using namespace emco;

namespace {

BoundsProblem make_problem(std::size_t groups, ShapeRestriction shape) {
  Rng rng(31);
  BoundsProblem p;
  p.shares.resize(groups);
  double total = 0.0;
  for (double& w : p.shares) {
    w = 0.05 + rng.uniform01();
    total += w;
  }
  for (double& w : p.shares) w /= total;
  p.support_lo = -2.0;
  p.support_hi = 2.0;
  p.untreated_mean_pooled = 0.3;
  p.treated_means.resize(groups);
  for (double& y : p.treated_means) y = -1.0 + 2.0 * rng.uniform01();
  if (shape == ShapeRestriction::DecreasingInLevel) {
    // Descending means keep the restricted program feasible (Y0 == m works).
    std::sort(p.treated_means.begin(), p.treated_means.end(),
              std::greater<double>());
  }
  p.shape = shape;
  return p;
}

void BM_ClosedFormBounds(benchmark::State& state) {
  const BoundsProblem p = make_problem(
      static_cast<std::size_t>(state.range(0)), ShapeRestriction::None);
  for (auto _ : state) {
    BoundsResult r = effect_bounds(p);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_ClosedFormBounds)->Arg(3)->Arg(12);

void BM_SimplexBounds(benchmark::State& state) {
  const BoundsProblem p =
      make_problem(static_cast<std::size_t>(state.range(0)),
                   ShapeRestriction::DecreasingInLevel);
  for (auto _ : state) {
    BoundsResult r = effect_bounds(p);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_SimplexBounds)->Arg(3)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
