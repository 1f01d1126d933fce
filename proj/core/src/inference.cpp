#include "emco/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emco/error.hpp"
#include "emco/parallel.hpp"
#include "emco/rng.hpp"
#include "emco/stats.hpp"

namespace emco {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ActiveMoments {
  std::vector<std::size_t> index;  // positions in the original set
  std::vector<const std::vector<double>*> contrib;
  std::vector<double> mean, sd, t;
  bool deterministic_violation = false;
};

// Splits the set into usable moments and the zero-variance cases: sd == 0
// with mean <= 0 is uninformative and excluded, sd == 0 with mean > 0 is a
// deterministic violation.
ActiveMoments screen_moments(const MomentSet& ms) {
  ActiveMoments act;
  const double root_n = std::sqrt(static_cast<double>(ms.n));
  for (std::size_t j = 0; j < ms.size(); ++j) {
    const Moment& m = ms.moments[j];
    if (m.sd == 0.0) {
      if (m.mean > 0.0) act.deterministic_violation = true;
      continue;
    }
    act.index.push_back(j);
    act.contrib.push_back(&m.contrib);
    act.mean.push_back(m.mean);
    act.sd.push_back(m.sd);
    act.t.push_back(root_n * m.mean / m.sd);
  }
  return act;
}

EmpiricalQuantiles bootstrap_max_impl(
    const std::vector<const std::vector<double>*>& contrib,
    std::span<const double> centering, std::size_t n,
    const std::vector<int>& cluster_id, std::size_t B, std::uint64_t seed,
    unsigned threads) {
  const std::size_t p = contrib.size();
  EmpiricalQuantiles out;
  if (B == 0) fail(ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
  out.sorted.assign(B, -kInf);
  if (p == 0) {
    std::fill(out.sorted.begin(), out.sorted.end(), 0.0);
    return out;
  }

  // Row-major contribution matrix for cache-friendly accumulation.
  std::vector<double> matrix(n * p);
  for (std::size_t j = 0; j < p; ++j) {
    const std::vector<double>& col = *contrib[j];
    for (std::size_t i = 0; i < n; ++i) matrix[i * p + j] = col[i];
  }
  const std::vector<std::vector<int>> groups = resampling_groups(cluster_id, n);
  const std::size_t n_groups = groups.size();

  parallel_for(B, threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, 0xB5A7u, b));
    std::vector<double> acc(p, 0.0), acc2(p, 0.0);
    std::size_t count = 0;
    for (std::size_t g = 0; g < n_groups; ++g) {
      const auto& rows = groups[rng.bounded(n_groups)];
      for (int r : rows) {
        const double* row = matrix.data() + static_cast<std::size_t>(r) * p;
        for (std::size_t j = 0; j < p; ++j) {
          acc[j] += row[j];
          acc2[j] += row[j] * row[j];
        }
        ++count;
      }
    }
    if (count < 2) return;  // leaves -inf, harmless in the quantile
    const double nb = static_cast<double>(count);
    const double root_nb = std::sqrt(nb);
    double best = -kInf;
    for (std::size_t j = 0; j < p; ++j) {
      const double mb = acc[j] / nb;
      double var = (acc2[j] - nb * mb * mb) / (nb - 1.0);
      if (var <= 0.0) continue;  // degenerate resample of this moment
      const double stat = root_nb * (mb - centering[j]) / std::sqrt(var);
      if (stat > best) best = stat;
    }
    out.sorted[b] = best;
  });

  std::sort(out.sorted.begin(), out.sorted.end());
  return out;
}

TestResult make_base_result(const MomentSet& ms, const ActiveMoments& act,
                            TestMethod method, double alpha, double beta_n,
                            std::size_t B, std::uint64_t seed) {
  TestResult res;
  res.method = method;
  res.alpha = alpha;
  res.beta_n = beta_n;
  res.B = B;
  res.seed = seed;
  res.n = ms.n;
  res.p = ms.size();
  res.per_moment.resize(ms.size());
  for (std::size_t j = 0; j < ms.size(); ++j) {
    MomentDiagnostic& d = res.per_moment[j];
    d.label = ms.moments[j].label;
    d.mean = ms.moments[j].mean;
    d.sd = ms.moments[j].sd;
    d.t = kNaN;
    d.excluded = ms.moments[j].sd == 0.0;
  }
  for (std::size_t a = 0; a < act.index.size(); ++a)
    res.per_moment[act.index[a]].t = act.t[a];
  return res;
}

void check_levels(double alpha, double beta_n) {
  if (!(beta_n > 0.0) || !(beta_n < alpha) || !(alpha < 1.0))
    fail(ErrorCode::InvalidArgument,
         "need 0 < beta_n < alpha < 1 for the two-step procedures");
}

}  // namespace

const char* to_string(TestMethod m) {
  return m == TestMethod::Rsw ? "rsw" : "cck";
}

double EmpiricalQuantiles::quantile(double q) const {
  return quantile_type1(sorted, q);
}

double ks_statistic(const MomentSet& ms) {
  const ActiveMoments act = screen_moments(ms);
  if (act.deterministic_violation) return kInf;
  double t_max = 0.0;
  for (double t : act.t) t_max = std::max(t_max, t);
  return t_max;
}

EmpiricalQuantiles bootstrap_max_distribution(const MomentSet& ms,
                                              std::span<const double> centering,
                                              std::size_t B, std::uint64_t seed,
                                              unsigned threads) {
  if (centering.size() != ms.size())
    fail(ErrorCode::InvalidArgument, "centering length mismatch");
  std::vector<const std::vector<double>*> contrib;
  contrib.reserve(ms.size());
  for (const Moment& m : ms.moments) contrib.push_back(&m.contrib);
  return bootstrap_max_impl(contrib, centering, ms.n, ms.cluster_id, B, seed,
                            threads);
}

TestResult rsw_test(const MomentSet& ms, double alpha, std::size_t B,
                    double beta_n, std::uint64_t seed, unsigned threads) {
  check_levels(alpha, beta_n);
  const ActiveMoments act = screen_moments(ms);
  TestResult res = make_base_result(ms, act, TestMethod::Rsw, alpha, beta_n, B, seed);
  if (B < 100)
    res.warnings.push_back("InsufficientReplications: B < 100");

  res.statistic = ks_statistic(ms);
  if (act.deterministic_violation) {
    res.warnings.push_back("zero-variance moment with positive mean: "
                           "deterministic violation");
    res.critical_value = 0.0;
    res.reject = true;
    return res;
  }

  const std::size_t p = act.index.size();
  const double root_n = std::sqrt(static_cast<double>(ms.n));

  // Step 1: simultaneous upper confidence bounds at level 1 - beta_n.
  const EmpiricalQuantiles stage1 = bootstrap_max_impl(
      act.contrib, act.mean, ms.n, ms.cluster_id, B, derive_seed(seed, 1u),
      threads);
  const double b1 = stage1.quantile(1.0 - beta_n);

  // Step 2: recenter at min(mean + bound, 0) and bootstrap the recentered max.
  std::vector<double> recentered(p), centering(p);
  for (std::size_t a = 0; a < p; ++a) {
    const double bound = act.mean[a] + b1 * act.sd[a] / root_n;
    recentered[a] = std::min(bound, 0.0);
    centering[a] = act.mean[a] - recentered[a];
    res.per_moment[act.index[a]].recentered = recentered[a];
  }
  const EmpiricalQuantiles stage2 = bootstrap_max_impl(
      act.contrib, centering, ms.n, ms.cluster_id, B, derive_seed(seed, 2u),
      threads);
  res.critical_value = std::max(stage2.quantile(1.0 - alpha + beta_n), 0.0);
  res.reject = res.statistic > res.critical_value;
  return res;
}

TestResult cck_test(const MomentSet& ms, double alpha, std::size_t B,
                    double beta_n, std::uint64_t seed, unsigned threads) {
  check_levels(alpha, beta_n);
  const ActiveMoments act = screen_moments(ms);
  TestResult res = make_base_result(ms, act, TestMethod::Cck, alpha, beta_n, B, seed);
  if (B < 100)
    res.warnings.push_back("InsufficientReplications: B < 100");

  res.statistic = ks_statistic(ms);
  if (act.deterministic_violation) {
    res.warnings.push_back("zero-variance moment with positive mean: "
                           "deterministic violation");
    res.critical_value = 0.0;
    res.reject = true;
    return res;
  }

  // Step 1: first-stage critical value for the centered max statistic.
  const EmpiricalQuantiles stage1 = bootstrap_max_impl(
      act.contrib, act.mean, ms.n, ms.cluster_id, B, derive_seed(seed, 1u),
      threads);
  const double c1 = stage1.quantile(1.0 - beta_n);

  // Step 2: keep moments whose studentized value clears -2 c1.
  std::vector<const std::vector<double>*> kept;
  std::vector<double> kept_mean;
  for (std::size_t a = 0; a < act.index.size(); ++a) {
    const bool keep = act.t[a] > -2.0 * c1;
    res.per_moment[act.index[a]].selected = keep;
    if (keep) {
      kept.push_back(act.contrib[a]);
      kept_mean.push_back(act.mean[a]);
    }
  }
  if (kept.empty()) {
    res.critical_value = 0.0;
    res.reject = res.statistic > 0.0;
    return res;
  }
  const EmpiricalQuantiles stage2 =
      bootstrap_max_impl(kept, kept_mean, ms.n, ms.cluster_id, B,
                         derive_seed(seed, 2u), threads);
  res.critical_value =
      std::max(stage2.quantile(1.0 - alpha + 2.0 * beta_n), 0.0);
  res.reject = res.statistic > res.critical_value;
  return res;
}

}  // namespace emco
