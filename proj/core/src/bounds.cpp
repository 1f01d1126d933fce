#include "emco/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "emco/error.hpp"
#include "emco/lp.hpp"

namespace emco {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kShareTol = 1e-10;
constexpr double kFeasTol = 1e-12;

std::vector<std::size_t> positive_share_levels(const BoundsProblem& p) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < p.shares.size(); ++k)
    if (p.shares[k] > 0.0) idx.push_back(k);
  return idx;
}

// Solves sum_k w_k x_k = target with x_k in [lo_k, hi_k] by a greedy fill.
// Returns nullopt when the target is outside the attainable span.
std::optional<std::vector<double>> waterfill(const std::vector<double>& w,
                                             const std::vector<double>& lo,
                                             const std::vector<double>& hi,
                                             double target) {
  const std::size_t k = w.size();
  std::vector<double> x(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::clamp(0.0, lo[i], hi[i]);
    if (!std::isfinite(x[i])) x[i] = std::isfinite(lo[i]) ? lo[i] : hi[i];
    if (!std::isfinite(x[i])) x[i] = 0.0;
  }
  double current = 0.0;
  for (std::size_t i = 0; i < k; ++i) current += w[i] * x[i];

  for (std::size_t i = 0; i < k; ++i) {
    const double gap = target - current;
    if (std::abs(gap) <= kFeasTol) return x;
    if (w[i] <= 0.0) continue;
    if (gap > 0.0) {
      const double headroom = hi[i] - x[i];
      const double step = std::min(headroom, gap / w[i]);
      x[i] += step;
      current += w[i] * step;
    } else {
      const double footroom = x[i] - lo[i];
      const double step = std::min(footroom, -gap / w[i]);
      x[i] -= step;
      current -= w[i] * step;
    }
  }
  if (std::abs(target - current) <= 1e-9 * std::max(1.0, std::abs(target)))
    return x;
  return std::nullopt;
}

}  // namespace

void BoundsProblem::validate() const {
  if (shares.empty() || shares.size() != treated_means.size())
    fail(ErrorCode::InvalidArgument, "bounds problem needs matching shares and means");
  double sum = 0.0;
  for (std::size_t k = 0; k < shares.size(); ++k) {
    if (shares[k] < -kShareTol)
      fail(ErrorCode::InvalidShares,
           "negative complier share at level " + std::to_string(k + 1));
    sum += std::max(shares[k], 0.0);
  }
  if (std::abs(sum - 1.0) > kShareTol)
    fail(ErrorCode::InvalidShares, "complier shares must sum to 1");
  if (!(support_lo <= support_hi))
    fail(ErrorCode::InvalidArgument, "support_lo > support_hi");
  if (untreated_mean_pooled < support_lo - kFeasTol ||
      untreated_mean_pooled > support_hi + kFeasTol)
    fail(ErrorCode::InfeasibleProblem,
         "pooled untreated mean lies outside the outcome support");
  for (std::size_t k = 0; k < shares.size(); ++k)
    if (shares[k] > 0.0 && !std::isfinite(treated_means[k]))
      fail(ErrorCode::InvalidArgument,
           "treated mean missing at positive-share level " +
               std::to_string(k + 1));
}

BoundsProblem BoundsProblem::from_decomposition(
    const ComplierDecomposition& dec, double support_lo, double support_hi,
    ShapeRestriction shape) {
  BoundsProblem p;
  p.untreated_mean_pooled = dec.untreated_mean_pooled;
  p.support_lo = support_lo;
  p.support_hi = support_hi;
  p.shape = shape;
  p.shares.reserve(dec.levels.size());
  p.treated_means.reserve(dec.levels.size());
  for (const LevelMean& lm : dec.levels) {
    double share = lm.share;
    if (share < 0.0 && share >= -kShareTol) share = 0.0;
    p.shares.push_back(share);
    p.treated_means.push_back(lm.defined ? lm.value
                                         : std::numeric_limits<double>::quiet_NaN());
  }
  p.validate();
  return p;
}

namespace {

BoundsResult closed_form_bounds(const BoundsProblem& p,
                                const std::vector<std::size_t>& active) {
  const double m = p.untreated_mean_pooled;
  BoundsResult out;
  out.effects.reserve(p.shares.size());

  for (std::size_t k = 0; k < p.shares.size(); ++k) {
    EffectBound eb;
    eb.level = static_cast<int>(k) + 1;
    if (p.shares[k] <= 0.0) {
      eb.skipped_zero_share = true;
      out.effects.push_back(std::move(eb));
      continue;
    }
    // Budget left for the other groups when this one sits at an extreme.
    double others_max = 0.0, others_min = 0.0;
    for (std::size_t j : active) {
      if (j == k) continue;
      others_max += p.shares[j] * p.support_hi;  // +inf propagates
      others_min += p.shares[j] * p.support_lo;
    }
    const double cand_lo = (m - others_max) / p.shares[k];
    const double cand_hi = (m - others_min) / p.shares[k];
    const double y0_lo = std::max(p.support_lo, cand_lo);
    const double y0_hi = std::min(p.support_hi, cand_hi);
    eb.lo = p.treated_means[k] - y0_hi;
    eb.hi = p.treated_means[k] - y0_lo;
    eb.informative = std::isfinite(eb.lo) && std::isfinite(eb.hi);

    if (eb.informative) {
      // Attaining Y0 vectors over the active levels.
      std::vector<double> w, lo_vec, hi_vec;
      std::vector<std::size_t> others;
      for (std::size_t j : active) {
        if (j == k) continue;
        others.push_back(j);
        w.push_back(p.shares[j]);
        lo_vec.push_back(p.support_lo);
        hi_vec.push_back(p.support_hi);
      }
      auto assemble = [&](double own_value,
                          const std::optional<std::vector<double>>& rest) {
        std::vector<double> full(p.shares.size(),
                                 std::numeric_limits<double>::quiet_NaN());
        full[k] = own_value;
        if (rest)
          for (std::size_t t = 0; t < others.size(); ++t)
            full[others[t]] = (*rest)[t];
        return full;
      };
      eb.arg_lo = assemble(
          y0_hi, waterfill(w, lo_vec, hi_vec, m - p.shares[k] * y0_hi));
      eb.arg_hi = assemble(
          y0_lo, waterfill(w, lo_vec, hi_vec, m - p.shares[k] * y0_lo));
    }
    out.effects.push_back(std::move(eb));
  }
  return out;
}

BoundsResult lp_bounds(const BoundsProblem& p,
                       const std::vector<std::size_t>& active) {
  const std::size_t nv = active.size();
  LpProblem base;
  base.n_vars = nv;
  base.objective.assign(nv, 0.0);
  base.lower.assign(nv, p.support_lo);
  base.upper.assign(nv, p.support_hi);

  LpRow avg;
  avg.coeffs.assign(nv, 0.0);
  for (std::size_t t = 0; t < nv; ++t) avg.coeffs[t] = p.shares[active[t]];
  avg.rel = LpRelation::Eq;
  avg.rhs = p.untreated_mean_pooled;
  base.rows.push_back(avg);

  if (p.shape == ShapeRestriction::DecreasingInLevel) {
    // effect(d_t) >= effect(d_{t+1}) over consecutive active levels:
    //   -Y0_t + Y0_{t+1} >= treated_{t+1} - treated_t.
    for (std::size_t t = 0; t + 1 < nv; ++t) {
      LpRow row;
      row.coeffs.assign(nv, 0.0);
      row.coeffs[t] = -1.0;
      row.coeffs[t + 1] = 1.0;
      row.rel = LpRelation::Ge;
      row.rhs = p.treated_means[active[t + 1]] - p.treated_means[active[t]];
      base.rows.push_back(std::move(row));
    }
  }

  BoundsResult out;
  out.effects.reserve(p.shares.size());
  std::size_t slot = 0;
  for (std::size_t k = 0; k < p.shares.size(); ++k) {
    EffectBound eb;
    eb.level = static_cast<int>(k) + 1;
    if (p.shares[k] <= 0.0) {
      eb.skipped_zero_share = true;
      out.effects.push_back(std::move(eb));
      continue;
    }
    LpProblem lp = base;
    lp.objective.assign(nv, 0.0);
    lp.objective[slot] = 1.0;

    const LpSolution min_y0 = solve_lp(lp);
    const LpSolution max_y0 = maximize_lp(lp);
    if (min_y0.status == LpStatus::Infeasible ||
        max_y0.status == LpStatus::Infeasible)
      fail(ErrorCode::InfeasibleProblem,
           "no untreated means satisfy the support, average and shape "
           "constraints");

    auto expand = [&](const std::vector<double>& x) {
      std::vector<double> full(p.shares.size(),
                               std::numeric_limits<double>::quiet_NaN());
      for (std::size_t t = 0; t < nv; ++t) full[active[t]] = x[t];
      return full;
    };
    // max effect comes from the smallest Y0, min effect from the largest.
    eb.hi = min_y0.status == LpStatus::Unbounded
                ? kInf
                : p.treated_means[k] - min_y0.objective;
    eb.lo = max_y0.status == LpStatus::Unbounded
                ? -kInf
                : p.treated_means[k] - max_y0.objective;
    eb.informative = std::isfinite(eb.lo) && std::isfinite(eb.hi);
    if (min_y0.status == LpStatus::Optimal) eb.arg_hi = expand(min_y0.x);
    if (max_y0.status == LpStatus::Optimal) eb.arg_lo = expand(max_y0.x);
    out.effects.push_back(std::move(eb));
    ++slot;
  }
  return out;
}

}  // namespace

BoundsResult effect_bounds(const BoundsProblem& prob) {
  prob.validate();
  const std::vector<std::size_t> active = positive_share_levels(prob);
  if (active.empty())
    fail(ErrorCode::InvalidShares, "no positive complier shares");
  if (prob.shape == ShapeRestriction::None)
    return closed_form_bounds(prob, active);
  return lp_bounds(prob, active);
}

FeasibilityResult joint_sign_feasible(const BoundsProblem& prob,
                                      SignDirection dir, double strict_margin) {
  prob.validate();
  const std::vector<std::size_t> active = positive_share_levels(prob);
  if (active.empty())
    fail(ErrorCode::InvalidShares, "no positive complier shares");

  const double margin = dir == SignDirection::StrictlyPositive ? strict_margin : 0.0;
  std::vector<double> w, lo, hi;
  FeasibilityResult res;
  for (std::size_t k : active) {
    w.push_back(prob.shares[k]);
    double l = prob.support_lo, h = prob.support_hi;
    switch (dir) {
      case SignDirection::NonNegative:
        h = std::min(h, prob.treated_means[k]);
        break;
      case SignDirection::StrictlyPositive:
        h = std::min(h, prob.treated_means[k] - margin);
        break;
      case SignDirection::NonPositive:
        l = std::max(l, prob.treated_means[k]);
        break;
    }
    if (l > h + kFeasTol) {
      res.feasible = false;
      res.certificate = "level " + std::to_string(k + 1) +
                        ": no untreated mean in the support satisfies the "
                        "sign constraint";
      return res;
    }
    lo.push_back(l);
    hi.push_back(std::max(h, l));
  }

  double span_lo = 0.0, span_hi = 0.0;
  for (std::size_t t = 0; t < w.size(); ++t) {
    span_lo += w[t] * lo[t];
    span_hi += w[t] * hi[t];
  }
  const double m = prob.untreated_mean_pooled;
  if (m < span_lo - kFeasTol) {
    res.feasible = false;
    res.certificate =
        "pooled untreated mean below the attainable range under the sign "
        "constraint";
    return res;
  }
  if (m > span_hi + kFeasTol) {
    res.feasible = false;
    res.certificate =
        "pooled untreated mean above the attainable range under the sign "
        "constraint";
    return res;
  }
  res.feasible = true;
  const auto fill = waterfill(w, lo, hi, m);
  if (fill) {
    res.witness.assign(prob.shares.size(),
                       std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < active.size(); ++t)
      res.witness[active[t]] = (*fill)[t];
  }
  return res;
}

}  // namespace emco
