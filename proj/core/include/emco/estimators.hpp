#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emco/dataset.hpp"

namespace emco {

// Arm-wise first-stage differences. delta_pr[d] = Pr(D=d|Z=1) - Pr(D=d|Z=0)
// for every canonical level; entries sum to zero. delta_any = Pr(D>0|Z=1) -
// Pr(D>0|Z=0) is accumulated as the sum of the positive-level entries so that
// complier shares built from delta_pr are internally consistent.
struct FirstStageDiffs {
  std::vector<double> delta_pr;  // size d_max+1
  double delta_mean_d = 0.0;     // E[D|Z=1] - E[D|Z=0]
  double delta_any = 0.0;        // Pr(D>0|Z=1) - Pr(D>0|Z=0)
  double p_hat = 0.0;            // sample Pr(Z=1)
  std::size_t n = 0, n1 = 0, n0 = 0;
};

FirstStageDiffs first_stage_diffs(const Dataset& data);

// Dose weights of the ordered-treatment Wald estimand, built from the
// CDF-style differences Pr(D>=d|Z=1) - Pr(D>=d|Z=0) for d = 1..d_max.
// They sum to one whenever the mean first stage is nonzero.
std::vector<double> acr_weights(const FirstStageDiffs& fs);

// Outcome/endogenous transform pair for a Wald ratio.
//   acr():              Y on D                 -> average causal response
//   recoded():          Y on 1(D>0)            -> any-treatment estimand
//   treated_mean(d):    Y*1(D=d) on 1(D=d)     -> d-type complier treated mean
//   untreated_mean():   Y*1(D=0) on 1(D=0)     -> pooled complier mean at D=0
//   covariate_mean(d,k) X_k*1(D=d) on 1(D=d)   -> d-type complier covariate mean
struct WaldTarget {
  enum class Kind {
    RawTreatment,
    AnyTreatment,
    LevelTreated,
    UntreatedPooled,
    CovariateLevel,
  };
  Kind kind = Kind::RawTreatment;
  int level = -1;
  int covariate = -1;

  static WaldTarget acr() { return {Kind::RawTreatment, -1, -1}; }
  static WaldTarget recoded() { return {Kind::AnyTreatment, -1, -1}; }
  static WaldTarget treated_mean(int d) { return {Kind::LevelTreated, d, -1}; }
  static WaldTarget untreated_mean() { return {Kind::UntreatedPooled, -1, -1}; }
  static WaldTarget covariate_mean(int d, int k) {
    return {Kind::CovariateLevel, d, k};
  }

  std::string label() const;
};

// Builds the (outcome, endogenous) series for a target.
std::pair<std::vector<double>, std::vector<double>> wald_series(
    const Dataset& data, const WaldTarget& target);

struct WaldEstimate {
  double value = 0.0;
  double reduced_form = 0.0;
  double first_stage = 0.0;
  std::optional<double> se;  // heteroskedasticity-robust (HC0) IV sandwich
  std::size_t n = 0;
};

// Wald ratio of arm-mean differences. Throws ZeroFirstStage when the
// transformed first stage is exactly zero, DegenerateArm when an arm is empty.
WaldEstimate wald(const Dataset& data, const WaldTarget& target);

struct LevelMean {
  int level = 0;
  double share = 0.0;      // complier share at this level (can be negative)
  double delta_pr = 0.0;   // first-stage mass difference at this level
  bool defined = false;    // false when delta_pr <= 0: mean not identified
  double value = 0.0;      // treated complier mean, valid when defined
  std::optional<double> se;
  std::optional<double> share_se;
};

// Decomposition of the any-treatment estimand into complier shares, per-level
// treated means and the pooled untreated mean. Identity on every dataset:
//   sum_d share[d]*treated_mean[d] - untreated_mean_pooled = beta_recoded.
// Negative estimated shares are reported as-is; they are a diagnostic, not an
// error.
struct ComplierDecomposition {
  double total_complier_share = 0.0;  // Pr(D>0|Z=1) - Pr(D>0|Z=0)
  double beta_recoded = 0.0;
  double untreated_mean_pooled = 0.0;
  std::optional<double> beta_recoded_se;
  std::optional<double> untreated_se;
  std::optional<double> total_share_se;
  std::vector<LevelMean> levels;  // d = 1..d_max
  std::size_t n = 0;
};

ComplierDecomposition complier_decomposition(const Dataset& data);

// Same, with cluster-bootstrap standard errors attached.
ComplierDecomposition complier_decomposition_with_se(const Dataset& data,
                                                     std::size_t B,
                                                     std::uint64_t seed,
                                                     unsigned threads = 0);

// Complier-isolating weighting schemes. Each variant's weight w satisfies
// E_n[w*g] / E_n[w] = complier mean of g for the corresponding population,
// with Pr(Z=1) plugged in as the sample share so the result matches the
// ratio-of-reduced-forms estimators exactly.
enum class KappaVariant {
  AllCompliers,    // any-treatment compliers, g may use Y, 1(D>0), X
  TreatedLevel,    // d-type compliers under treatment; requires level
  UntreatedPooled  // compliers under no treatment
};

double kappa_estimate(
    const Dataset& data, KappaVariant variant, int level,
    const std::function<double(const Dataset&, std::size_t)>& g);

// OLS coefficient on Z from regressing `target` on [Z, 1, covariates, strata
// dummies], computed from the residualized-Z (Frisch-Waugh-Lovell) form.
double fwl_coef(const Dataset& data, std::span<const double> target);

// Same coefficient from the full normal equations; used as the cross-check
// route. The two agree to numerical precision on full-rank designs.
double ols_coef_on_z(const Dataset& data, std::span<const double> target);

// Covariate/strata-adjusted Wald ratio: both transforms are regressed on the
// residualized instrument; value = reduced_form / first_stage. Throws
// RankDeficientCovariates when the design (with intercept and strata dummies)
// is rank deficient.
WaldEstimate fwl_adjust(const Dataset& data, const WaldTarget& target);

// Nonparametric cluster bootstrap (observation bootstrap when no cluster ids
// are present). Deterministic for fixed (seed, B) regardless of thread count:
// replication r uses an RNG stream derived from (seed, r). Statistics may
// throw Error on degenerate resamples; such replicates are dropped and
// counted out of n_valid.
struct BootstrapSummary {
  std::vector<double> se;
  std::vector<double> ci_lo, ci_hi;
  std::vector<std::size_t> n_valid;
  std::size_t B = 0;
};

BootstrapSummary cluster_bootstrap(
    const Dataset& data,
    const std::function<std::vector<double>(const Dataset&)>& stat,
    std::size_t B, std::uint64_t seed, double ci_level = 0.95,
    unsigned threads = 0);

struct ScalarBootstrap {
  double se = 0.0;
  double lo = 0.0, hi = 0.0;
  std::size_t n_valid = 0;
};

ScalarBootstrap cluster_bootstrap_se(
    const Dataset& data, const std::function<double(const Dataset&)>& stat,
    std::size_t B, std::uint64_t seed, double ci_level = 0.95,
    unsigned threads = 0);

}  // namespace emco
