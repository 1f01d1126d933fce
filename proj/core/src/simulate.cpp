#include "emco/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "emco/error.hpp"
#include "emco/moments.hpp"
#include "emco/parallel.hpp"
#include "emco/rng.hpp"

namespace emco {

namespace {

constexpr std::uint64_t kTagDraw = 0xD47Au;
constexpr std::uint64_t kTagCell = 0xCE11u;
constexpr std::uint64_t kTagTest = 0x7E57u;

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void check_prob(double v, const char* what) {
  if (!(v >= 0.0) || !(v <= 1.0))
    fail(ErrorCode::InvalidShares, std::string(what) + " must lie in [0,1]");
}

}  // namespace

SimConfig SimConfig::with_baseline(double a, double b, double ext1,
                                   double ext2, double intensive, double dy) {
  SimConfig cfg;
  cfg.a = a;
  cfg.b = b;
  cfg.delta_ext1 = ext1;
  cfg.delta_ext2 = ext2;
  cfg.delta_int = intensive;
  cfg.delta_y = dy;
  cfg.validate();
  return cfg;
}

SimConfig SimConfig::uniform_noncompliers(double ext1, double ext2,
                                          double intensive, double dy) {
  const double p_nc = 1.0 - ext1 - ext2 - intensive;
  const double third = p_nc / 3.0;
  return with_baseline(third + ext1 + ext2, third + intensive, ext1, ext2,
                       intensive, dy);
}

SimConfig SimConfig::uniform_noncompliers_share(double ext1, double ext2,
                                                double intensive_share,
                                                double dy) {
  if (!(intensive_share >= 0.0) || !(intensive_share < 1.0))
    fail(ErrorCode::InvalidShares, "intensive share must lie in [0,1)");
  const double intensive =
      intensive_share / (1.0 - intensive_share) * (ext1 + ext2);
  return uniform_noncompliers(ext1, ext2, intensive, dy);
}

double SimConfig::intensive_share_of_compliers() const {
  const double total = delta_ext1 + delta_ext2 + delta_int;
  return total > 0.0 ? delta_int / total : 0.0;
}

void SimConfig::validate() const {
  check_prob(delta_ext1, "delta_ext1");
  check_prob(delta_ext2, "delta_ext2");
  check_prob(delta_int, "delta_int");
  check_prob(never_taker_share(), "Pr(never-taker at 0) = a - ext1 - ext2");
  check_prob(always1_share(), "Pr(always-taker at 1) = b - delta_int");
  check_prob(always2_share(), "Pr(always-taker at 2) = 1 - a - b");
  check_prob(base_y_prob, "base_y_prob");
  check_prob(base_y_prob + delta_y, "base_y_prob + delta_y");
  if (!(z_prob > 0.0) || !(z_prob < 1.0))
    fail(ErrorCode::InvalidShares, "z_prob must lie in (0,1)");
  // Both treatment distributions must be proper.
  check_prob(a - delta_ext1 - delta_ext2, "Pr(D(1)=0)");
  check_prob(b + delta_ext1 - delta_int, "Pr(D(1)=1)");
  check_prob(1.0 - a - b + delta_ext2 + delta_int, "Pr(D(1)=2)");
  check_prob(a, "Pr(D(0)=0)");
  check_prob(b, "Pr(D(0)=1)");
}

SimDraw simulate_dataset(const SimConfig& cfg, std::uint64_t draw) {
  cfg.validate();
  const std::size_t n = cfg.n_obs;
  if (n < 2) fail(ErrorCode::InvalidArgument, "n_obs must be >= 2");

  const auto count_of = [&](double share) {
    return static_cast<std::size_t>(
        std::floor(share * static_cast<double>(n)));
  };
  const std::size_t n_e1 = count_of(cfg.delta_ext1);
  const std::size_t n_e2 = count_of(cfg.delta_ext2);
  const std::size_t n_int = count_of(cfg.delta_int);
  const std::size_t n_nc = n - n_e1 - n_e2 - n_int;  // remainder units

  // Non-complier level distribution conditional on being a non-complier.
  const double p_nc = cfg.p_noncompliers();
  double q0 = 1.0 / 3.0, q1 = 1.0 / 3.0;
  if (p_nc > 0.0) {
    q0 = cfg.never_taker_share() / p_nc;
    q1 = cfg.always1_share() / p_nc;
  }

  Rng rng(derive_seed(cfg.seed, kTagDraw, draw));

  SimDraw out;
  out.type.resize(n);
  out.d0.resize(n);
  out.d1.resize(n);
  std::vector<double> y(n), d(n);
  std::vector<int> z(n);

  for (std::size_t i = 0; i < n; ++i) {
    UnitType t;
    if (i < n_nc) t = UnitType::NonComplier;
    else if (i < n_nc + n_e1) t = UnitType::ExtensiveTo1;
    else if (i < n_nc + n_e1 + n_e2) t = UnitType::ExtensiveTo2;
    else t = UnitType::Intensive;
    out.type[i] = t;

    int d0 = 0, d1 = 0;
    switch (t) {
      case UnitType::NonComplier: {
        const double u = rng.uniform01();
        const int level = u < q0 ? 0 : (u < q0 + q1 ? 1 : 2);
        d0 = d1 = level;
        break;
      }
      case UnitType::ExtensiveTo1:
        d0 = 0;
        d1 = 1;
        break;
      case UnitType::ExtensiveTo2:
        d0 = 0;
        d1 = 2;
        break;
      case UnitType::Intensive:
        d0 = 1;
        d1 = 2;
        break;
    }
    out.d0[i] = d0;
    out.d1[i] = d1;

    z[i] = rng.bernoulli(cfg.z_prob) ? 1 : 0;
    d[i] = z[i] ? d1 : d0;
    const double p_y =
        t == UnitType::Intensive ? cfg.base_y_prob + cfg.delta_y : cfg.base_y_prob;
    y[i] = rng.bernoulli(p_y) ? 1.0 : 0.0;
  }

  DatasetInputs in;
  in.outcome = std::move(y);
  in.treatment = std::move(d);
  in.instrument = std::move(z);
  out.data = build_dataset_with_levels(std::move(in), 2);
  return out;
}

PopulationOracle::PopulationOracle(const SimConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  struct Type {
    double share;
    int d0, d1;
    double y1;
  };
  const Type types[] = {
      {cfg.never_taker_share(), 0, 0, cfg.base_y_prob},
      {cfg.always1_share(), 1, 1, cfg.base_y_prob},
      {cfg.always2_share(), 2, 2, cfg.base_y_prob},
      {cfg.delta_ext1, 0, 1, cfg.base_y_prob},
      {cfg.delta_ext2, 0, 2, cfg.base_y_prob},
      {cfg.delta_int, 1, 2, cfg.base_y_prob + cfg.delta_y},
  };

  for (const Type& t : types) {
    pr_dz_[t.d0][0] += t.share;
    pr_dz_[t.d1][1] += t.share;
    pr_y1dz_[t.d0][0] += t.share * t.y1;
    pr_y1dz_[t.d1][1] += t.share * t.y1;
  }

  delta_pr.resize(3);
  double mean_d1 = 0.0, mean_d0 = 0.0;
  double mean_y1d[3];
  for (int d = 0; d < 3; ++d) {
    delta_pr[d] = pr_dz_[d][1] - pr_dz_[d][0];
    mean_d1 += d * pr_dz_[d][1];
    mean_d0 += d * pr_dz_[d][0];
    mean_y1d[d] = pr_y1dz_[d][1] - pr_y1dz_[d][0];
  }
  delta_mean_d = mean_d1 - mean_d0;
  delta_any = delta_pr[1] + delta_pr[2];

  const double delta_mean_y = mean_y1d[0] + mean_y1d[1] + mean_y1d[2];
  beta_acr = delta_mean_d != 0.0 ? delta_mean_y / delta_mean_d : 0.0;
  beta_recoded = delta_any != 0.0 ? delta_mean_y / delta_any : 0.0;

  // CDF-difference weights over doses d = 1, 2.
  const double cdf1 = delta_pr[1] + delta_pr[2];  // Pr(D>=1) difference
  const double cdf2 = delta_pr[2];
  const double cdf_total = cdf1 + cdf2;
  acr_weights = {cdf_total != 0.0 ? cdf1 / cdf_total : 0.0,
                 cdf_total != 0.0 ? cdf2 / cdf_total : 0.0};

  recoded_shares = {delta_any != 0.0 ? delta_pr[1] / delta_any : 0.0,
                    delta_any != 0.0 ? delta_pr[2] / delta_any : 0.0};
  treated_mean_estimand = {
      delta_pr[1] != 0.0 ? mean_y1d[1] / delta_pr[1] : 0.0,
      delta_pr[2] != 0.0 ? mean_y1d[2] / delta_pr[2] : 0.0};
  untreated_mean_estimand =
      delta_pr[0] != 0.0 ? mean_y1d[0] / delta_pr[0] : 0.0;
}

double PopulationOracle::level_moment(int d) const {
  const double diff = pr_dz_[d][1] - pr_dz_[d][0];
  return d == 0 ? diff : -diff;
}

double PopulationOracle::set_moment(int d, int y_value) const {
  const double p1 = y_value == 1 ? pr_y1dz_[d][1] : pr_dz_[d][1] - pr_y1dz_[d][1];
  const double p0 = y_value == 1 ? pr_y1dz_[d][0] : pr_dz_[d][0] - pr_y1dz_[d][0];
  const double diff = p1 - p0;
  return d == 0 ? diff : -diff;
}

PopulationOracle::ReducedFormTerms PopulationOracle::reduced_form_terms(
    int d) const {
  ReducedFormTerms terms;
  const double y_base = cfg_.base_y_prob;
  const double y_int = cfg_.base_y_prob + cfg_.delta_y;
  if (d == 1) {
    terms.extensive_in = y_base * cfg_.delta_ext1;
    terms.intensive_out = y_int * cfg_.delta_int;  // shifted from 1 to 2
  } else if (d == 2) {
    terms.extensive_in = y_base * cfg_.delta_ext2;
    terms.intensive_in = y_int * cfg_.delta_int;  // arriving at 2 from 1
  }
  return terms;
}

void HurdleConfig::validate() const {
  if (thresholds.size() < 2)
    fail(ErrorCode::InvalidArgument, "need at least two level thresholds");
  if (thresholds.front() != 1.0 || thresholds.back() != 0.0)
    fail(ErrorCode::InvalidArgument,
         "level thresholds must start at 1 and end at 0");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] > thresholds[i - 1])
      fail(ErrorCode::InvalidArgument, "level thresholds must be decreasing");
  check_prob(pi0_z0, "pi0_z0");
  check_prob(pi0_z1, "pi0_z1");
  if (pi0_z1 > pi0_z0)
    fail(ErrorCode::InvalidArgument,
         "instrument must weakly increase participation (pi0_z1 <= pi0_z0)");
  if (!(copula_rho > -1.0) || !(copula_rho < 1.0))
    fail(ErrorCode::InvalidArgument, "copula_rho must lie in (-1,1)");
  if (!outcome.level_mean.empty() &&
      outcome.level_mean.size() != thresholds.size())
    fail(ErrorCode::InvalidArgument,
         "outcome level_mean must have d_max+1 entries");
}

HurdleDraw generate_hurdle(const HurdleConfig& cfg, std::size_t n,
                           std::uint64_t seed) {
  cfg.validate();
  const int d_max = cfg.d_max();
  std::vector<double> mu = cfg.outcome.level_mean;
  if (mu.empty()) mu.assign(static_cast<std::size_t>(d_max) + 1, 0.0);

  Rng rng(derive_seed(seed, 0x48D1u));
  HurdleDraw out;
  out.u_ext.resize(n);
  out.u_int.resize(n);
  out.d0.resize(n);
  out.d1.resize(n);
  std::vector<double> y(n), d(n);
  std::vector<int> z(n);

  const double rho = cfg.copula_rho;
  const double rho_c = std::sqrt(1.0 - rho * rho);

  auto intensity_level = [&](double u) {
    for (int level = 1; level <= d_max; ++level) {
      if (u >= cfg.thresholds[level] && u < cfg.thresholds[level - 1])
        return level;
    }
    return d_max;  // u == 1 cannot occur; ties on equal thresholds land here
  };

  for (std::size_t i = 0; i < n; ++i) {
    double u_ext, u_int;
    if (rho == 0.0) {
      u_ext = rng.uniform01();
      u_int = rng.uniform01();
    } else {
      const double g1 = rng.normal();
      const double g2 = rho * g1 + rho_c * rng.normal();
      u_ext = normal_cdf(g1);
      u_int = normal_cdf(g2);
    }
    out.u_ext[i] = u_ext;
    out.u_int[i] = u_int;

    const int level = intensity_level(u_int);
    out.d0[i] = u_ext <= cfg.pi0_z0 ? 0 : level;
    out.d1[i] = u_ext <= cfg.pi0_z1 ? 0 : level;

    z[i] = rng.bernoulli(0.5) ? 1 : 0;
    const int treat = z[i] ? out.d1[i] : out.d0[i];
    d[i] = treat;
    y[i] = mu[treat] + cfg.outcome.load_ext * u_ext +
           cfg.outcome.load_int * u_int;
    if (cfg.outcome.noise_sd > 0.0) y[i] += cfg.outcome.noise_sd * rng.normal();
  }

  DatasetInputs in;
  in.outcome = std::move(y);
  in.treatment = std::move(d);
  in.instrument = std::move(z);
  out.data = build_dataset_with_levels(std::move(in), d_max);
  return out;
}

HurdleOracle hurdle_oracle(const HurdleConfig& cfg) {
  cfg.validate();
  if (cfg.copula_rho != 0.0)
    fail(ErrorCode::InvalidArgument,
         "closed-form oracle requires the independent copula");
  HurdleOracle out;
  out.total_complier_share = cfg.pi0_z0 - cfg.pi0_z1;
  if (out.total_complier_share <= 0.0)
    fail(ErrorCode::ZeroFirstStage, "no compliers: pi0_z0 == pi0_z1");

  const int d_max = cfg.d_max();
  std::vector<double> mu = cfg.outcome.level_mean;
  if (mu.empty()) mu.assign(static_cast<std::size_t>(d_max) + 1, 0.0);
  const double mid_ext = 0.5 * (cfg.pi0_z0 + cfg.pi0_z1);

  out.shares.resize(d_max);
  out.treated_means.resize(d_max);
  double pooled = 0.0;
  for (int level = 1; level <= d_max; ++level) {
    const double width = cfg.thresholds[level - 1] - cfg.thresholds[level];
    const double mid_int = 0.5 * (cfg.thresholds[level - 1] + cfg.thresholds[level]);
    out.shares[level - 1] = width;
    out.treated_means[level - 1] = mu[level] + cfg.outcome.load_ext * mid_ext +
                                   cfg.outcome.load_int * mid_int;
    pooled += width * (mu[0] + cfg.outcome.load_ext * mid_ext +
                       cfg.outcome.load_int * mid_int);
  }
  out.untreated_mean_pooled = pooled;
  return out;
}

std::vector<PowerCell> power_curve(std::span<const SimConfig> grid,
                                   TestMethod method, double alpha,
                                   std::size_t B, std::uint64_t seed,
                                   unsigned threads, std::size_t partition_bins) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "empty simulation grid");

  std::vector<std::size_t> offsets(grid.size() + 1, 0);
  for (std::size_t c = 0; c < grid.size(); ++c)
    offsets[c + 1] = offsets[c] + grid[c].n_sims;
  const std::size_t total = offsets.back();

  // 1 = reject, 0 = accept, -1 = per-simulation failure.
  std::vector<signed char> outcome(total, -1);

  parallel_for(total, threads, [&](std::size_t task) {
    const std::size_t c =
        static_cast<std::size_t>(
            std::upper_bound(offsets.begin(), offsets.end(), task) -
            offsets.begin()) -
        1;
    const std::size_t s = task - offsets[c];
    try {
      SimConfig cfg = grid[c];
      cfg.seed = derive_seed(seed, kTagCell, c);
      const SimDraw draw = simulate_dataset(cfg, s);
      const MomentSet ms = build_emco_moments(
          draw.data, quantile_partition(draw.data, partition_bins));
      const std::uint64_t test_seed = derive_seed(seed, kTagTest, c, s);
      const double beta_n = alpha / 10.0;
      const TestResult res =
          method == TestMethod::Rsw
              ? rsw_test(ms, alpha, B, beta_n, test_seed, 1)
              : cck_test(ms, alpha, B, beta_n, test_seed, 1);
      outcome[task] = res.reject ? 1 : 0;
    } catch (const std::exception&) {
      outcome[task] = -1;
    }
  });

  std::vector<PowerCell> cells(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    PowerCell& cell = cells[c];
    cell.index = c;
    cell.cfg = grid[c];
    cell.method = method;
    std::size_t rejects = 0;
    for (std::size_t t = offsets[c]; t < offsets[c + 1]; ++t) {
      if (outcome[t] < 0) ++cell.n_errors;
      else {
        ++cell.n_done;
        rejects += outcome[t];
      }
    }
    if (cell.n_done > 0) {
      cell.reject_rate =
          static_cast<double>(rejects) / static_cast<double>(cell.n_done);
      cell.binom_se = std::sqrt(cell.reject_rate * (1.0 - cell.reject_rate) /
                                static_cast<double>(cell.n_done));
    }
  }
  return cells;
}

}  // namespace emco
