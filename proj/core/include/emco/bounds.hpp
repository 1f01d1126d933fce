#pragma once

#include <string>
#include <vector>

#include "emco/estimators.hpp"

namespace emco {

enum class ShapeRestriction { None, DecreasingInLevel };

enum class SignDirection { NonNegative, NonPositive, StrictlyPositive };

// Inputs for partial identification of per-level complier treatment effects.
// The unknowns are the untreated means Y0_d of each complier group; they are
// disciplined only by the outcome support and by the identified weighted
// average sum_d shares[d] * Y0_d = untreated_mean_pooled.
struct BoundsProblem {
  std::vector<double> shares;         // d = 1..d_max, nonnegative, sum to 1
  std::vector<double> treated_means;  // identified Y_d^d, same indexing
  double untreated_mean_pooled = 0.0;
  double support_lo = 0.0;  // -inf allowed
  double support_hi = 0.0;  // +inf allowed
  ShapeRestriction shape = ShapeRestriction::None;

  // Throws InvalidShares / InfeasibleProblem on bad inputs.
  void validate() const;

  static BoundsProblem from_decomposition(const ComplierDecomposition& dec,
                                          double support_lo, double support_hi,
                                          ShapeRestriction shape =
                                              ShapeRestriction::None);
};

struct EffectBound {
  int level = 0;
  bool skipped_zero_share = false;  // share == 0: effect not identified here
  double lo = 0.0, hi = 0.0;        // bound on Y_d^d - Y0_d
  bool informative = false;         // both endpoints finite
  std::vector<double> arg_lo, arg_hi;  // attaining Y0 vectors (when finite)
};

struct BoundsResult {
  std::vector<EffectBound> effects;
};

// Per-level min/max of Y_d^d - Y0_d subject to the support box and the
// weighted-average constraint. Without a shape restriction the solution has a
// closed form; with the decreasing-in-level restriction the bounded-variable
// simplex is used. Zero-share levels are skipped (their Y0 is dropped from
// the program entirely).
BoundsResult effect_bounds(const BoundsProblem& prob);

struct FeasibilityResult {
  bool feasible = false;
  std::vector<double> witness;  // Y0 vector over positive-share levels
  std::string certificate;     // why infeasible, empty otherwise
};

// Existence of untreated means consistent with every effect satisfying the
// sign constraint. Reduces to an interval condition on the pooled untreated
// mean: with effects >= 0, each Y0_d must lie in [support_lo,
// min(Y_d^d, support_hi)], so feasibility holds iff the pooled mean is inside
// the weighted span of those intervals. strict_margin implements the strict
// inequality as effect >= margin (the closure convention at margin 0).
FeasibilityResult joint_sign_feasible(const BoundsProblem& prob,
                                      SignDirection dir,
                                      double strict_margin = 0.0);

}  // namespace emco
