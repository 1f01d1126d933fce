#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "emco/moments.hpp"

namespace emco {

enum class TestMethod { Rsw, Cck };

const char* to_string(TestMethod m);

struct MomentDiagnostic {
  std::string label;
  double mean = 0.0;
  double sd = 0.0;
  double t = 0.0;           // sqrt(n) * mean / sd; NaN when excluded
  double recentered = 0.0;  // RSW recentering value (<= 0); 0 for CCK
  bool selected = true;     // CCK first-stage retention; true for RSW
  bool excluded = false;    // sd == 0 with nonpositive mean
};

struct TestResult {
  double statistic = 0.0;       // T_n = max(max_j sqrt(n) mean_j / sd_j, 0)
  double critical_value = 0.0;  // floored at 0; ties favor non-rejection
  bool reject = false;          // statistic > critical_value
  TestMethod method = TestMethod::Rsw;
  double alpha = 0.0;
  double beta_n = 0.0;  // first-stage level
  std::size_t B = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;  // observations
  std::size_t p = 0;  // moments
  std::vector<MomentDiagnostic> per_moment;
  std::vector<std::string> warnings;
};

// Variance-adjusted Kolmogorov-Smirnov statistic over the moment set.
// Zero-variance moments with nonpositive means are skipped; a zero-variance
// moment with a positive mean is a deterministic violation and yields +inf.
double ks_statistic(const MomentSet& ms);

// Empirical distribution of a bootstrapped max statistic. quantile() is the
// left-continuous (type-1) inverse CDF.
struct EmpiricalQuantiles {
  std::vector<double> sorted;  // ascending

  double quantile(double q) const;
};

// Nonparametric bootstrap (cluster-aware when the moment set carries cluster
// ids) of max_j sqrt(n_b) * (mean*_j - centering_j) / sd*_j, recomputing the
// per-replicate mean and sd of every moment's contributions. Replicate b
// draws from the RNG stream derived from (seed, b), so the result does not
// depend on thread count.
EmpiricalQuantiles bootstrap_max_distribution(const MomentSet& ms,
                                              std::span<const double> centering,
                                              std::size_t B, std::uint64_t seed,
                                              unsigned threads = 0);

// Two-step recentering procedure (Romano-Shaikh-Wolf). Step 1 forms
// simultaneous upper 1-beta_n confidence bounds on each moment mean from a
// bootstrap max quantile; step 2 recenters every moment at
// min(mean_j + bound_j, 0) and takes the (1 - alpha + beta_n) bootstrap
// quantile of the recentered max statistic as the critical value.
TestResult rsw_test(const MomentSet& ms, double alpha, std::size_t B,
                    double beta_n, std::uint64_t seed, unsigned threads = 0);

// Two-step moment-selection procedure (Chernozhukov-Chetverikov-Kato).
// Step 1 computes a bootstrap critical value c at level 1-beta_n for the max
// studentized statistic; step 2 retains moments with t_j > -2c and takes the
// (1 - alpha + 2 beta_n) bootstrap quantile over the retained moments. With
// nothing retained the critical value is 0.
TestResult cck_test(const MomentSet& ms, double alpha, std::size_t B,
                    double beta_n, std::uint64_t seed, unsigned threads = 0);

}  // namespace emco
