// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria. `--only N` runs a single criterion, `--threads T`
// caps the worker pool.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "emco/bounds.hpp"
#include "emco/dataset.hpp"
#include "emco/error.hpp"
#include "emco/estimators.hpp"
#include "emco/inference.hpp"
#include "emco/lp.hpp"
#include "emco/moments.hpp"
#include "emco/parallel.hpp"
#include "emco/rng.hpp"
#include "emco/simulate.hpp"
#include "support/grid_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace emco;

namespace {

unsigned g_threads = 0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Failure {
  std::ostringstream os;
  bool any = false;
};

template <typename T>
void expect(Failure& f, bool ok, const T& what) {
  if (!ok) {
    if (!f.any) f.os << what;
    f.any = true;
  }
}

// ---------------------------------------------------------------------------
// 1. Algebraic identities at 1e-10 on random 10k-row datasets.

Outcome criterion1() {
  Failure fail;
  const double tol = 1e-10;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    testing::RandomDataOptions opt;
    opt.n = 10000;
    opt.d_max = 3;
    opt.covariates = true;
    opt.strata = true;
    opt.cluster = true;
    const Dataset data = testing::make_random_dataset(seed, opt);

    // (a) Both Wald forms multiply back to the same reduced form.
    const WaldEstimate acr = wald(data, WaldTarget::acr());
    const WaldEstimate rec = wald(data, WaldTarget::recoded());
    expect(fail,
           std::abs(rec.value * rec.first_stage - acr.value * acr.first_stage) <= tol,
           "(a) reduced-form identity");

    // (b) Share-weighted treated means minus the pooled untreated mean.
    const ComplierDecomposition dec = complier_decomposition(data);
    double weighted = 0.0;
    for (const LevelMean& lm : dec.levels) {
      expect(fail, lm.defined, "(b) undefined level in generator");
      weighted += lm.share * lm.value;
    }
    expect(fail,
           std::abs(weighted - dec.untreated_mean_pooled - dec.beta_recoded) <= tol,
           "(b) reconstruction identity");

    // (c) Complier-weighting estimators equal the ratio estimators.
    auto outcome = [](const Dataset& d, std::size_t i) { return d.outcome[i]; };
    auto x0 = [](const Dataset& d, std::size_t i) { return d.x(i, 0); };
    for (const LevelMean& lm : dec.levels) {
      expect(fail,
             std::abs(kappa_estimate(data, KappaVariant::TreatedLevel, lm.level,
                                     outcome) -
                      lm.value) <= tol,
             "(c) treated-mean weighting identity");
      expect(fail,
             std::abs(kappa_estimate(data, KappaVariant::TreatedLevel, lm.level,
                                     x0) -
                      wald(data, WaldTarget::covariate_mean(lm.level, 0)).value) <=
                 tol,
             "(c) covariate-mean weighting identity");
    }
    expect(fail,
           std::abs(kappa_estimate(data, KappaVariant::UntreatedPooled, -1,
                                   outcome) -
                    dec.untreated_mean_pooled) <= tol,
           "(c) untreated weighting identity");
    auto one = [](const Dataset&, std::size_t) { return 1.0; };
    expect(fail,
           std::abs(kappa_estimate(data, KappaVariant::UntreatedPooled, -1, one) -
                    1.0) <= tol,
           "(c) weighting normalization");

    // (d) Adjacent CDF-difference moments equal the level moments.
    const MomentSet levels_ms = build_emco_moments(data, {});
    const MomentSet cdf = build_late_cdf_moments(data);
    for (int d = 1; d <= data.d_max(); ++d) {
      const Moment& level = levels_ms.moments[static_cast<std::size_t>(d)];
      const Moment& adj =
          cdf.moments[static_cast<std::size_t>(data.d_max() + d - 1)];
      double max_diff = std::abs(level.mean - adj.mean);
      for (std::size_t i = 0; i < level.contrib.size(); ++i)
        max_diff = std::max(max_diff,
                            std::abs(level.contrib[i] - adj.contrib[i]));
      expect(fail, max_diff <= tol, "(d) adjacent-CDF identity");
    }

    // (e) Residualized and direct regression routes coincide.
    auto [y, w] = wald_series(data, WaldTarget::recoded());
    expect(fail, std::abs(fwl_coef(data, y) - ols_coef_on_z(data, y)) <= tol,
           "(e) coefficient route identity (outcome)");
    expect(fail, std::abs(fwl_coef(data, w) - ols_coef_on_z(data, w)) <= tol,
           "(e) coefficient route identity (endogenous)");
  }
  return {!fail.any, fail.any ? fail.os.str() : "identities hold at 1e-10 on 10 datasets"};
}

// ---------------------------------------------------------------------------
// 2. Population oracle vs direct enumeration, and 100k-draw sample moments.

struct BruteType {
  double share;
  int d0, d1;
  double py;
};

std::vector<BruteType> brute_types(const SimConfig& cfg) {
  return {{cfg.never_taker_share(), 0, 0, cfg.base_y_prob},
          {cfg.always1_share(), 1, 1, cfg.base_y_prob},
          {cfg.always2_share(), 2, 2, cfg.base_y_prob},
          {cfg.delta_ext1, 0, 1, cfg.base_y_prob},
          {cfg.delta_ext2, 0, 2, cfg.base_y_prob},
          {cfg.delta_int, 1, 2, cfg.base_y_prob + cfg.delta_y}};
}

double brute_pr_dy(const SimConfig& cfg, int d, int y, int z) {
  double total = 0.0;
  for (const BruteType& t : brute_types(cfg)) {
    const int treat = z == 1 ? t.d1 : t.d0;
    if (treat == d) total += t.share * (y == 1 ? t.py : 1.0 - t.py);
  }
  return total;
}

Outcome criterion2() {
  Failure fail;
  Rng rng(0xC2);
  const double tol = 1e-12;
  std::vector<SimConfig> configs;
  for (int rep = 0; rep < 50; ++rep) {
    const double e1 = 0.03 + 0.15 * rng.uniform01();
    const double e2 = 0.03 + 0.15 * rng.uniform01();
    const double di = 0.15 * rng.uniform01();
    const double dy = -0.2 + 0.5 * rng.uniform01();
    if (rep % 2 == 0) {
      configs.push_back(SimConfig::uniform_noncompliers(e1, e2, di, dy));
    } else {
      const double rest = 1.0 - e1 - e2 - di;
      double u0 = rng.uniform01(), u1 = rng.uniform01(), u2 = rng.uniform01();
      const double us = u0 + u1 + u2;
      configs.push_back(SimConfig::with_baseline(
          rest * u0 / us + e1 + e2, rest * u1 / us + di, e1, e2, di, dy));
    }
  }

  for (const SimConfig& cfg : configs) {
    const PopulationOracle oracle(cfg);

    double delta_mean_y = 0.0, delta_mean_d = 0.0, delta_any = 0.0;
    for (int d = 0; d < 3; ++d) {
      double pr1 = 0.0, pr0 = 0.0;
      for (int y = 0; y < 2; ++y) {
        pr1 += brute_pr_dy(cfg, d, y, 1);
        pr0 += brute_pr_dy(cfg, d, y, 0);
      }
      const double delta_pr = pr1 - pr0;
      expect(fail, std::abs(oracle.delta_pr[d] - delta_pr) <= tol,
             "delta_pr mismatch");
      delta_mean_d += d * delta_pr;
      if (d > 0) delta_any += delta_pr;
      const double dy1 = brute_pr_dy(cfg, d, 1, 1) - brute_pr_dy(cfg, d, 1, 0);
      delta_mean_y += dy1;

      // <=0-oriented restrictions for the full set and both outcome values.
      const double level = d == 0 ? delta_pr : -delta_pr;
      expect(fail, std::abs(oracle.level_moment(d) - level) <= tol,
             "level moment mismatch");
      for (int y = 0; y < 2; ++y) {
        const double diff =
            brute_pr_dy(cfg, d, y, 1) - brute_pr_dy(cfg, d, y, 0);
        const double moment = d == 0 ? diff : -diff;
        expect(fail, std::abs(oracle.set_moment(d, y) - moment) <= tol,
               "set moment mismatch");
      }
    }
    expect(fail, std::abs(oracle.delta_mean_d - delta_mean_d) <= tol,
           "delta mean mismatch");
    expect(fail,
           std::abs(oracle.beta_acr - delta_mean_y / delta_mean_d) <= tol,
           "acr mismatch");
    expect(fail,
           std::abs(oracle.beta_recoded - delta_mean_y / delta_any) <= tol,
           "recoded mismatch");
    for (int d : {1, 2}) {
      const double num =
          brute_pr_dy(cfg, d, 1, 1) - brute_pr_dy(cfg, d, 1, 0);
      const double den = oracle.delta_pr[d];
      if (std::abs(den) > 1e-9)
        expect(fail,
               std::abs(oracle.treated_mean_estimand[d - 1] - num / den) <= tol,
               "treated-mean estimand mismatch");
    }
  }

  // Sampled moments stay within 4 standard errors of the oracle.
  std::vector<signed char> sample_ok(configs.size(), 1);
  parallel_for(configs.size(), g_threads, [&](std::size_t c) {
    SimConfig cfg = configs[c];
    cfg.n_obs = 100000;
    cfg.seed = derive_seed(0xC2D2, c);
    const SimDraw draw = simulate_dataset(cfg, 0);
    const PopulationOracle oracle(cfg);
    const MomentSet ms =
        build_emco_moments(draw.data, quantile_partition(draw.data, 10));
    const double root_n = std::sqrt(100000.0);
    for (const Moment& m : ms.moments) {
      const int d = m.label[2] - '0';
      double target;
      if (m.label.find("A=all") != std::string::npos)
        target = oracle.level_moment(d);
      else if (m.label.find("y<=0") != std::string::npos)
        target = oracle.set_moment(d, 0);
      else
        target = oracle.set_moment(d, 1);
      if (std::abs(m.mean - target) > 4.0 * m.sd / root_n + 1e-9)
        sample_ok[c] = 0;
    }
  });
  for (std::size_t c = 0; c < configs.size(); ++c)
    expect(fail, sample_ok[c] == 1, "sample moments beyond 4 se of oracle");

  return {!fail.any,
          fail.any ? fail.os.str()
                   : "oracle matches enumeration on 50 configs; 100k-draw "
                     "moments within 4 se"};
}

// ---------------------------------------------------------------------------
// 3/4/5. Desk-scale size and power grid, both procedures.

struct GridRates {
  std::vector<PowerCell> rsw, cck;
};

const GridRates& desk_grid() {
  static const GridRates rates = [] {
    std::vector<SimConfig> grid;
    auto cell = [](double dint, double dy) {
      SimConfig cfg = SimConfig::uniform_noncompliers(0.1, 0.1, dint, dy);
      cfg.n_obs = 1000;
      cfg.n_sims = 500;
      return cfg;
    };
    grid.push_back(cell(0.0, 0.2));   // size
    grid.push_back(cell(0.1, 0.0));   // power curve in the outcome gap
    grid.push_back(cell(0.1, 0.15));
    grid.push_back(cell(0.1, 0.3));
    grid.push_back(cell(0.3, 0.2));   // power at a strong intensive share
    GridRates out;
    out.rsw = power_curve(grid, TestMethod::Rsw, 0.05, 500, 0xF16, g_threads);
    out.cck = power_curve(grid, TestMethod::Cck, 0.05, 500, 0xF16, g_threads);
    return out;
  }();
  return rates;
}

Outcome criterion3() {
  const GridRates& rates = desk_grid();
  const double rsw_size = rates.rsw[0].reject_rate;
  const double cck_size = rates.cck[0].reject_rate;
  std::ostringstream os;
  os << "size at null: rsw=" << rsw_size << " cck=" << cck_size
     << " (bound 0.08, n_sims=500, B=500)";
  const bool pass = rates.rsw[0].n_errors == 0 && rates.cck[0].n_errors == 0 &&
                    rsw_size <= 0.08 && cck_size <= 0.08;
  return {pass, os.str()};
}

Outcome criterion4() {
  const GridRates& rates = desk_grid();
  std::ostringstream os;
  bool pass = true;

  const double rsw_power = rates.rsw[4].reject_rate;
  const double cck_power = rates.cck[4].reject_rate;
  os << "power at intensive level 0.3 (dy=0.2): rsw=" << rsw_power
     << " cck=" << cck_power << " (bound 0.8)";
  pass = pass && rsw_power >= 0.8 && cck_power >= 0.8;

  // Rejection weakly increases in the outcome gap at fixed intensive share,
  // up to two binomial standard errors.
  for (const auto* method : {&rates.rsw, &rates.cck}) {
    for (std::size_t k = 1; k + 1 < 4; ++k) {
      const PowerCell& lo = (*method)[k];
      const PowerCell& hi = (*method)[k + 1];
      const double slack =
          2.0 * std::sqrt(lo.binom_se * lo.binom_se + hi.binom_se * hi.binom_se);
      if (hi.reject_rate < lo.reject_rate - slack) pass = false;
    }
  }
  os << "; dy-curve rsw=(" << rates.rsw[1].reject_rate << ","
     << rates.rsw[2].reject_rate << "," << rates.rsw[3].reject_rate << ")";
  return {pass, os.str()};
}

Outcome criterion5() {
  const GridRates& rates = desk_grid();
  double worst = -1.0;
  for (std::size_t c = 0; c < rates.rsw.size(); ++c)
    worst = std::max(worst, rates.cck[c].reject_rate - rates.rsw[c].reject_rate);
  std::ostringstream os;
  os << "max(cck - rsw) over the grid = " << worst << " (bound 0.03)";
  return {worst <= 0.03, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Bounds: closed form vs simplex, grid oracle, sign-feasibility routes.

BoundsProblem random_bounds_problem(Rng& rng, std::size_t groups) {
  BoundsProblem p;
  p.shares.resize(groups);
  double total = 0.0;
  for (double& w : p.shares) {
    w = 0.05 + rng.uniform01();
    total += w;
  }
  for (double& w : p.shares) w /= total;
  p.support_lo = -1.0 - 2.0 * rng.uniform01();
  p.support_hi = 1.0 + 2.0 * rng.uniform01();
  const double span = p.support_hi - p.support_lo;
  p.untreated_mean_pooled = p.support_lo + rng.uniform01() * span;
  p.treated_means.resize(groups);
  for (double& y : p.treated_means) y = p.support_lo + rng.uniform01() * span;
  return p;
}

Outcome criterion6() {
  Failure fail;
  Rng rng(0xB0);

  // Closed form vs generic simplex on 1000 random feasible problems.
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t groups = 1 + rng.bounded(6);
    const BoundsProblem p = random_bounds_problem(rng, groups);
    const BoundsResult closed = effect_bounds(p);
    for (std::size_t k = 0; k < groups; ++k) {
      LpProblem lp;
      lp.n_vars = groups;
      lp.objective.assign(groups, 0.0);
      lp.objective[k] = 1.0;
      lp.lower.assign(groups, p.support_lo);
      lp.upper.assign(groups, p.support_hi);
      lp.rows.push_back({p.shares, LpRelation::Eq, p.untreated_mean_pooled});
      const LpSolution mn = solve_lp(lp);
      const LpSolution mx = maximize_lp(lp);
      expect(fail,
             mn.status == LpStatus::Optimal && mx.status == LpStatus::Optimal,
             "lp unexpectedly not optimal");
      expect(fail,
             std::abs(closed.effects[k].hi -
                      (p.treated_means[k] - mn.objective)) <= 1e-8,
             "closed-form upper endpoint differs from simplex");
      expect(fail,
             std::abs(closed.effects[k].lo -
                      (p.treated_means[k] - mx.objective)) <= 1e-8,
             "closed-form lower endpoint differs from simplex");
    }
  }

  // Grid-search oracle at mesh 1e-3 for two-group problems.
  for (int rep = 0; rep < 30; ++rep) {
    BoundsProblem p = random_bounds_problem(rng, 2);
    p.shares = {0.3 + 0.4 * rng.uniform01(), 0.0};
    p.shares[1] = 1.0 - p.shares[0];
    const BoundsResult closed = effect_bounds(p);
    const testing::GridBounds grid = testing::grid_effect_bounds(p, 1e-3);
    const double ratio01 = p.shares[0] / p.shares[1];
    const double tol1 = 1e-3 * (1.0 + 1.0 / ratio01) + 1e-9;
    const double tol2 = 1e-3 * (1.0 + ratio01) + 1e-9;
    expect(fail, grid.any_feasible, "grid found no feasible point");
    expect(fail, std::abs(closed.effects[0].lo - grid.lo1) <= tol1,
           "grid oracle lower endpoint (group 1)");
    expect(fail, std::abs(closed.effects[0].hi - grid.hi1) <= tol1,
           "grid oracle upper endpoint (group 1)");
    expect(fail, std::abs(closed.effects[1].lo - grid.lo2) <= tol2,
           "grid oracle lower endpoint (group 2)");
    expect(fail, std::abs(closed.effects[1].hi - grid.hi2) <= tol2,
           "grid oracle upper endpoint (group 2)");
  }

  // Sign feasibility equals the analytic interval condition: cross-check the
  // decision against an explicit linear program on 500 random problems.
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t groups = 1 + rng.bounded(5);
    const BoundsProblem p = random_bounds_problem(rng, groups);
    for (SignDirection dir :
         {SignDirection::NonNegative, SignDirection::NonPositive}) {
      const FeasibilityResult analytic = joint_sign_feasible(p, dir);
      LpProblem lp;
      lp.n_vars = groups;
      lp.objective.assign(groups, 0.0);
      lp.lower.assign(groups, p.support_lo);
      lp.upper.assign(groups, p.support_hi);
      lp.rows.push_back({p.shares, LpRelation::Eq, p.untreated_mean_pooled});
      for (std::size_t k = 0; k < groups; ++k) {
        LpRow row;
        row.coeffs.assign(groups, 0.0);
        row.coeffs[k] = 1.0;
        row.rhs = p.treated_means[k];
        row.rel = dir == SignDirection::NonNegative ? LpRelation::Le
                                                    : LpRelation::Ge;
        lp.rows.push_back(std::move(row));
      }
      const bool lp_feasible = solve_lp(lp).status == LpStatus::Optimal;
      expect(fail, analytic.feasible == lp_feasible,
             "sign feasibility decision differs from the linear program");
      if (analytic.feasible) {
        double avg = 0.0;
        for (std::size_t k = 0; k < groups; ++k)
          avg += p.shares[k] * analytic.witness[k];
        expect(fail, std::abs(avg - p.untreated_mean_pooled) <= 1e-8,
               "witness violates the average constraint");
      }
    }
  }

  // The hand-constructed decision examples.
  {
    BoundsProblem p;
    p.shares = {0.5, 0.5};
    p.treated_means = {0.7, 0.6};
    p.untreated_mean_pooled = 0.4;
    p.support_lo = 0.0;
    p.support_hi = 1.0;
    expect(fail, joint_sign_feasible(p, SignDirection::NonNegative).feasible,
           "example 1 should be feasible");
    p.treated_means = {0.1, 0.1};
    expect(fail, !joint_sign_feasible(p, SignDirection::NonNegative).feasible,
           "example 2 should be infeasible");
    expect(fail, joint_sign_feasible(p, SignDirection::NonPositive).feasible,
           "example 3 should be feasible");
  }

  return {!fail.any,
          fail.any ? fail.os.str()
                   : "1000 simplex cross-checks at 1e-8; grid oracle at mesh "
                     "1e-3; 1000 sign-feasibility decisions match"};
}

// ---------------------------------------------------------------------------
// 7. Hurdle draws contain no latent intensive-margin compliers, exactly.

Outcome criterion7() {
  Failure fail;
  Rng rng(0x4D);
  std::size_t total_units = 0, violations = 0;
  for (int rep = 0; rep < 20; ++rep) {
    HurdleConfig cfg;
    const int d_max = 1 + static_cast<int>(rng.bounded(4));
    cfg.thresholds.assign(static_cast<std::size_t>(d_max) + 1, 0.0);
    cfg.thresholds.front() = 1.0;
    for (int k = 1; k < d_max; ++k) cfg.thresholds[k] = rng.uniform01();
    std::sort(cfg.thresholds.begin() + 1, cfg.thresholds.end() - 1,
              std::greater<double>());
    cfg.thresholds.back() = 0.0;
    cfg.pi0_z1 = 0.5 * rng.uniform01();
    cfg.pi0_z0 = cfg.pi0_z1 + (1.0 - cfg.pi0_z1) * rng.uniform01();
    cfg.copula_rho = rep % 3 == 0 ? 0.0 : (rep % 3 == 1 ? 0.55 : -0.45);
    const HurdleDraw draw = generate_hurdle(cfg, 50000, rng.next_u64());
    total_units += draw.d0.size();
    for (std::size_t i = 0; i < draw.d0.size(); ++i) {
      if (draw.d1[i] < draw.d0[i]) ++violations;
      if (draw.d1[i] > draw.d0[i] && draw.d0[i] > 0) ++violations;
    }
  }
  std::ostringstream os;
  os << total_units << " units across 20 random configs, " << violations
     << " latent violations";
  expect(fail, total_units >= 1000000, "not enough units drawn");
  expect(fail, violations == 0, "latent intensive compliers or defiers exist");
  return {!fail.any, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Decomposition recovers the hurdle truth within 3 Monte-Carlo ses.

Outcome criterion8() {
  Failure fail;
  HurdleConfig cfg;
  cfg.pi0_z0 = 0.6;
  cfg.pi0_z1 = 0.25;
  cfg.thresholds = {1.0, 0.65, 0.35, 0.0};
  cfg.outcome.level_mean = {0.3, 1.0, 1.7, 2.6};
  cfg.outcome.load_ext = -0.5;
  cfg.outcome.load_int = 0.8;
  cfg.outcome.noise_sd = 0.5;
  const HurdleOracle truth = hurdle_oracle(cfg);

  const HurdleDraw draw = generate_hurdle(cfg, 20000, 0xACC8);
  const ComplierDecomposition dec =
      complier_decomposition_with_se(draw.data, 400, 0xACC9, g_threads);

  std::ostringstream os;
  os << "n=20000, B=400:";
  for (std::size_t k = 0; k < truth.shares.size(); ++k) {
    const LevelMean& lm = dec.levels[k];
    expect(fail, lm.defined, "level mean undefined");
    const double mean_err = std::abs(lm.value - truth.treated_means[k]);
    const double share_err = std::abs(lm.share - truth.shares[k]);
    os << " d" << k + 1
       << ":|err|/se=" << (lm.se ? mean_err / *lm.se
                                 : std::numeric_limits<double>::quiet_NaN());
    expect(fail, lm.se && mean_err <= 3.0 * *lm.se,
           "treated mean beyond 3 se of truth");
    expect(fail, lm.share_se && share_err <= 3.0 * *lm.share_se,
           "share beyond 3 se of truth");
  }
  const double unt_err =
      std::abs(dec.untreated_mean_pooled - truth.untreated_mean_pooled);
  expect(fail, dec.untreated_se && unt_err <= 3.0 * *dec.untreated_se,
         "untreated mean beyond 3 se of truth");
  double truth_beta = -truth.untreated_mean_pooled;
  for (std::size_t k = 0; k < truth.shares.size(); ++k)
    truth_beta += truth.shares[k] * truth.treated_means[k];
  expect(fail,
         dec.beta_recoded_se &&
             std::abs(dec.beta_recoded - truth_beta) <= 3.0 * *dec.beta_recoded_se,
         "any-treatment effect beyond 3 se of truth");
  return {!fail.any, fail.any ? fail.os.str() : os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  g_threads = default_threads();
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc)
      g_threads = static_cast<unsigned>(std::atoi(argv[++i]));
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "algebraic identity suite", criterion1},
      {2, "population oracle equivalence", criterion2},
      {3, "test size under the null", criterion3},
      {4, "test power and outcome-gap monotonicity", criterion4},
      {5, "selection procedure is not less conservative", criterion5},
      {6, "effect bounds and sign feasibility", criterion6},
      {7, "hurdle model generates extensive-margin shifts only", criterion7},
      {8, "decomposition recovers hurdle truth", criterion8},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Outcome result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %d: %s — %s\n", result.pass ? "PASS" : "FAIL",
                c.id, c.name, result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures;
}
