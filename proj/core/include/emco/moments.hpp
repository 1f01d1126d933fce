#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emco/dataset.hpp"

namespace emco {

// Half-open outcome interval (lo, hi]; infinite endpoints allowed. Ties at a
// cut point fall in the lower bin.
struct OutcomeSet {
  std::string label;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double y) const { return y > lo && y <= hi; }
  bool is_full_support() const {
    return lo == -std::numeric_limits<double>::infinity() &&
           hi == std::numeric_limits<double>::infinity();
  }
};

OutcomeSet full_support_set();

// Partition of the observed outcome range into (up to) k quantile bins on
// order statistics; duplicate cut points collapse, so discrete outcomes give
// one bin per (run of) distinct values. k=10 gives the decile default.
std::vector<OutcomeSet> quantile_partition(const Dataset& data, std::size_t k);

// One studentizable moment in <=0 orientation: the null requires E[m] <= 0.
struct Moment {
  std::string label;
  std::string provenance;  // which restriction family produced it
  std::vector<double> contrib;  // per-observation m_ij, length n
  double mean = 0.0;  // sample mean of contrib
  double sd = 0.0;    // sample sd (n-1 denominator)
  bool empty_set = false;  // outcome set matched zero observations
};

struct MomentSet {
  std::vector<Moment> moments;
  std::size_t n = 0;
  std::vector<int> cluster_id;  // carried for cluster-aware bootstrap

  std::size_t size() const { return moments.size(); }
};

// The treatment-mass and joint outcome-treatment-mass restrictions implied by
// LATE plus the extensive-margin-compliers-only assumption, one moment per
// (treatment level, outcome set). The full-support set is always appended to
// the partition, so the per-level treatment-mass restrictions appear as its
// (d, all) moments and the total count is (d_max+1) * (|partition|+1).
// Contributions use indicator terms weighted by 1/p and 1/(1-p) with the
// sample share of Z=1 plugged in:
//   d = 0:  1(D=0) 1(Y in A) [ Z/p - (1-Z)/(1-p) ]   (mass at zero must fall)
//   d > 0:  1(D=d) 1(Y in A) [ (1-Z)/(1-p) - Z/p ]   (mass at d must rise)
// Empty outcome sets are kept and flagged, not dropped.
MomentSet build_emco_moments(const Dataset& data,
                             std::vector<OutcomeSet> partition);

// Instrument-monotonicity restrictions that hold under LATE alone, in <=0
// orientation: the Angrist-Imbens CDF form  -(Pr(D>=d|Z=1)-Pr(D>=d|Z=0)) and
// its adjacent-difference form, whose contributions telescope to exactly the
// per-level moments for d > 0.
MomentSet build_late_cdf_moments(const Dataset& data);

// Replicates every moment within each covariate cell (contributions gated by
// the cell indicator). cells must assign each observation an id in [0, C);
// C == 1 returns the input unchanged.
MomentSet interact_with_covariates(const MomentSet& ms, const Dataset& data,
                                   std::span<const int> cells);

// Cell ids from the strata column.
std::vector<int> strata_cells(const Dataset& data);

}  // namespace emco
