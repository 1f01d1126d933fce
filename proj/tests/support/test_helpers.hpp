#pragma once

#include <cmath>
#include <vector>

#include "emco/dataset.hpp"
#include "emco/rng.hpp"

namespace emco::testing {

struct RandomDataOptions {
  std::size_t n = 2000;
  int d_max = 2;
  bool covariates = false;
  bool strata = false;
  bool cluster = false;
  double z_prob = 0.45;
};

// Generic dataset with a nonzero first stage at every level: the Z=1 arm
// shifts treatment mass upward, the outcome loads on the level, the
// covariates and an arm-dependent tilt keep nothing orthogonal by accident.
inline Dataset make_random_dataset(std::uint64_t seed,
                                   const RandomDataOptions& opt = {}) {
  Rng rng(derive_seed(seed, 0x7357u));
  const int levels = opt.d_max + 1;

  // Z=1 moves mass out of level 0 and into every positive level, so each
  // per-level first-stage difference is positive.
  std::vector<double> p0(levels), p1(levels);
  double s0 = 0.0;
  for (int d = 0; d < levels; ++d) {
    p0[d] = 1.0 + (levels - d);
    s0 += p0[d];
  }
  for (int d = 0; d < levels; ++d) p0[d] /= s0;
  const double moved = 0.7 * p0[0];
  p1 = p0;
  p1[0] -= moved;
  double weight_total = 0.0;
  for (int d = 1; d < levels; ++d) weight_total += 1.0 + d;
  for (int d = 1; d < levels; ++d) p1[d] += moved * (1.0 + d) / weight_total;

  DatasetInputs in;
  in.outcome.resize(opt.n);
  in.treatment.resize(opt.n);
  in.instrument.resize(opt.n);
  if (opt.covariates) {
    in.covariate_names = {"x0", "x1"};
    in.covariates.resize(2 * opt.n);
  }
  if (opt.cluster) in.cluster_id.resize(opt.n);
  if (opt.strata) in.strata_id.resize(opt.n);

  for (std::size_t i = 0; i < opt.n; ++i) {
    const int z = rng.bernoulli(opt.z_prob) ? 1 : 0;
    const std::vector<double>& p = z ? p1 : p0;
    double u = rng.uniform01();
    int d = 0;
    while (d + 1 < levels && u >= p[d]) {
      u -= p[d];
      ++d;
    }
    const double x0 = rng.normal() + 0.25 * z;
    const double x1 = rng.uniform01();
    in.instrument[i] = z;
    in.treatment[i] = d;
    in.outcome[i] = 0.5 * d + 0.4 * x0 - 0.2 * x1 + rng.normal();
    if (opt.covariates) {
      in.covariates[i] = x0;
      in.covariates[opt.n + i] = x1;
    }
    if (opt.cluster) in.cluster_id[i] = static_cast<int>(i / 5);
    if (opt.strata) in.strata_id[i] = static_cast<int>(rng.bounded(4));
  }
  return build_dataset_with_levels(std::move(in), opt.d_max);
}

inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

}  // namespace emco::testing
