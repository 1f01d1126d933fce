#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "emco/dataset.hpp"
#include "emco/inference.hpp"

namespace emco {

// Finite-type DGP for a three-level ordered treatment with a binary
// instrument and binary outcome. The population consists of non-compliers
// (split across levels by the baseline shares a, b), two extensive-margin
// complier groups (0->1 and 0->2) and an intensive-margin group (1->2) whose
// presence violates the extensive-margin-compliers-only restriction.
// delta_y shifts the intensive group's outcome distribution.
struct SimConfig {
  double a = 0.0;  // baseline Pr(D(0)=0)
  double b = 0.0;  // baseline Pr(D(0)=1)
  double delta_ext1 = 0.0;
  double delta_ext2 = 0.0;
  double delta_int = 0.0;
  double delta_y = 0.0;
  double base_y_prob = 0.3;
  double z_prob = 0.5;
  std::size_t n_obs = 1000;
  std::size_t n_sims = 1000;
  std::uint64_t seed = 0;

  // General baseline treatment distribution.
  static SimConfig with_baseline(double a, double b, double ext1, double ext2,
                                 double intensive, double dy);

  // Non-compliers spread evenly across the three levels.
  static SimConfig uniform_noncompliers(double ext1, double ext2,
                                        double intensive, double dy);

  // Parameterized by the intensive group's share among all compliers.
  static SimConfig uniform_noncompliers_share(double ext1, double ext2,
                                              double intensive_share,
                                              double dy);

  double p_noncompliers() const {
    return 1.0 - delta_ext1 - delta_ext2 - delta_int;
  }
  double never_taker_share() const { return a - delta_ext1 - delta_ext2; }
  double always1_share() const { return b - delta_int; }
  double always2_share() const { return 1.0 - a - b; }
  double intensive_share_of_compliers() const;

  void validate() const;  // throws InvalidShares
};

enum class UnitType : std::uint8_t {
  NonComplier,
  ExtensiveTo1,
  ExtensiveTo2,
  Intensive,
};

// One simulated dataset with the latent types and potential treatments kept
// for oracle checks. Deterministic in (cfg.seed, draw).
struct SimDraw {
  Dataset data;
  std::vector<UnitType> type;
  std::vector<int> d0, d1;
};

// Type counts are assigned exactly (floor of n*share, remainder to
// non-compliers); non-compliers draw their level from the baseline
// conditional distribution; Z ~ Bernoulli(z_prob); the outcome is Bernoulli
// with base_y_prob (+ delta_y for the intensive group).
SimDraw simulate_dataset(const SimConfig& cfg, std::uint64_t draw);

// Exact population values implied by a SimConfig, from enumeration of the
// finite type x instrument x outcome space. Serves as the oracle for every
// sampled quantity.
struct PopulationOracle {
  explicit PopulationOracle(const SimConfig& cfg);

  std::vector<double> delta_pr;  // Pr(D=d|Z=1) - Pr(D=d|Z=0), d = 0..2
  double delta_mean_d = 0.0;
  double delta_any = 0.0;
  double beta_acr = 0.0;
  double beta_recoded = 0.0;
  std::vector<double> acr_weights;     // CDF-difference weights, d = 1..2
  std::vector<double> recoded_shares;  // complier shares, d = 1..2
  std::vector<double> treated_mean_estimand;  // per-level ratio values
  double untreated_mean_estimand = 0.0;

  // Population value of the <=0-oriented restriction at (level, outcome set).
  double level_moment(int d) const;          // full-support set
  double set_moment(int d, int y_value) const;  // binary outcome {y}

  double pr_d_given_z(int d, int z) const { return pr_dz_[d][z]; }
  double pr_y1_d_given_z(int d, int z) const { return pr_y1dz_[d][z]; }

  // Three-way split of the reduced form of Y*1(D=d): mass shifted into d from
  // zero, into d from below, and out of d to higher levels.
  struct ReducedFormTerms {
    double extensive_in = 0.0;
    double intensive_in = 0.0;
    double intensive_out = 0.0;
    double total() const { return extensive_in + intensive_in - intensive_out; }
  };
  ReducedFormTerms reduced_form_terms(int d) const;

 private:
  double pr_dz_[3][2] = {};     // Pr(D=d | Z=z)
  double pr_y1dz_[3][2] = {};   // Pr(Y=1, D=d | Z=z)
  SimConfig cfg_;
};

// Two-factor hurdle selection model: a participation factor U_ext compared
// against an instrument-specific threshold, then an intensity factor U_int
// placed among weakly decreasing level thresholds. Satisfies the
// extensive-margin restriction by construction.
struct HurdleOutcomeModel {
  std::vector<double> level_mean;  // size d_max+1
  double load_ext = 0.0;  // linear loading on U_ext
  double load_int = 0.0;  // linear loading on U_int
  double noise_sd = 0.0;
};

struct HurdleConfig {
  double pi0_z0 = 0.5;  // participation threshold, Z = 0 arm
  double pi0_z1 = 0.2;  // Z = 1 arm; must be <= pi0_z0
  // Level thresholds pi_1..pi_{d_max+1}: first 1, last 0, weakly decreasing.
  // Level d occupies [pi_{d+1}, pi_d).
  std::vector<double> thresholds = {1.0, 0.4, 0.0};
  double copula_rho = 0.0;  // Gaussian copula correlation of (U_ext, U_int)
  HurdleOutcomeModel outcome;

  int d_max() const { return static_cast<int>(thresholds.size()) - 1; }
  void validate() const;
};

struct HurdleDraw {
  Dataset data;
  std::vector<double> u_ext, u_int;
  std::vector<int> d0, d1;
};

HurdleDraw generate_hurdle(const HurdleConfig& cfg, std::size_t n,
                           std::uint64_t seed);

// Closed-form complier quantities for the independent-copula hurdle model
// with the linear outcome model (uniform factors make conditional means
// interval midpoints).
struct HurdleOracle {
  double total_complier_share = 0.0;
  std::vector<double> shares;         // d = 1..d_max
  std::vector<double> treated_means;  // d = 1..d_max
  double untreated_mean_pooled = 0.0;
};

HurdleOracle hurdle_oracle(const HurdleConfig& cfg);

// Size/power sweep: cell x simulation tasks run in parallel with seeds
// derived from (seed, cell, sim), so rates are reproducible and identical
// across methods run with the same seed (paired comparisons). Each simulated
// dataset is tested at first-stage level beta_n = alpha/10 on the quantile
// partition of its outcome. Per-simulation failures are counted, never fatal.
struct PowerCell {
  std::size_t index = 0;
  SimConfig cfg;
  TestMethod method = TestMethod::Rsw;
  double reject_rate = 0.0;
  double binom_se = 0.0;
  std::size_t n_done = 0;
  std::size_t n_errors = 0;
};

std::vector<PowerCell> power_curve(std::span<const SimConfig> grid,
                                   TestMethod method, double alpha,
                                   std::size_t B, std::uint64_t seed,
                                   unsigned threads = 0,
                                   std::size_t partition_bins = 10);

}  // namespace emco
