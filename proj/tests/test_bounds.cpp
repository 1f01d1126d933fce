#include <doctest.h>

#include <cmath>
#include <limits>

#include "emco/bounds.hpp"
#include "emco/error.hpp"
#include "emco/lp.hpp"
#include "emco/rng.hpp"
#include "support/grid_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace emco;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BoundsProblem two_group(double m, double y1, double y2, double lo, double hi) {
  BoundsProblem p;
  p.shares = {0.5, 0.5};
  p.treated_means = {y1, y2};
  p.untreated_mean_pooled = m;
  p.support_lo = lo;
  p.support_hi = hi;
  return p;
}

BoundsProblem random_problem(Rng& rng, std::size_t groups) {
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
  for (double& y : p.treated_means)
    y = p.support_lo + rng.uniform01() * span;
  return p;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("single complier group is point identified") {
  BoundsProblem p;
  p.shares = {1.0};
  p.treated_means = {0.7};
  p.untreated_mean_pooled = 0.4;
  p.support_lo = 0.0;
  p.support_hi = 1.0;
  const BoundsResult r = effect_bounds(p);
  REQUIRE(r.effects.size() == 1);
  CHECK(r.effects[0].lo == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r.effects[0].hi == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("two-group example matches the hand-derived intervals") {
  const BoundsProblem p = two_group(0.4, 0.7, 0.6, 0.0, 1.0);
  const BoundsResult r = effect_bounds(p);
  REQUIRE(r.effects.size() == 2);
  CHECK(r.effects[0].lo == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(r.effects[0].hi == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(r.effects[1].lo == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(r.effects[1].hi == doctest::Approx(0.6).epsilon(1e-12));

  // Attaining vectors satisfy the constraints.
  for (const EffectBound& eb : r.effects) {
    for (const auto& arg : {eb.arg_lo, eb.arg_hi}) {
      REQUIRE(arg.size() == 2);
      const double avg = 0.5 * arg[0] + 0.5 * arg[1];
      CHECK(testing::close(avg, 0.4, 1e-9));
      for (double v : arg) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-12);
      }
    }
  }

  const testing::GridBounds g = testing::grid_effect_bounds(p, 1e-3);
  CHECK(testing::close(g.lo1, r.effects[0].lo, 2e-3));
  CHECK(testing::close(g.hi1, r.effects[0].hi, 2e-3));
  CHECK(testing::close(g.lo2, r.effects[1].lo, 2e-3));
  CHECK(testing::close(g.hi2, r.effects[1].hi, 2e-3));
}

TEST_CASE("unbounded support is uninformative") {
  const BoundsProblem p = two_group(0.4, 0.7, 0.6, -kInf, kInf);
  const BoundsResult r = effect_bounds(p);
  CHECK(!r.effects[0].informative);
  CHECK(r.effects[0].lo == -kInf);
  CHECK(r.effects[0].hi == kInf);
}

TEST_CASE("half-bounded support still brackets both sides") {
  const BoundsProblem p = two_group(0.4, 0.7, 0.6, 0.0, kInf);
  const BoundsResult r = effect_bounds(p);
  // Y0_1 in [0, m/w1] = [0, 0.8]: the average constraint caps it even though
  // the support has no upper bound.
  CHECK(r.effects[0].informative);
  CHECK(r.effects[0].lo == doctest::Approx(0.7 - 0.8).epsilon(1e-12));
  CHECK(r.effects[0].hi == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("pooled mean outside the support is rejected") {
  const BoundsProblem p = two_group(1.4, 0.7, 0.6, 0.0, 1.0);
  CHECK_THROWS_AS(effect_bounds(p), Error);
  try {
    effect_bounds(p);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleProblem);
  }
}

TEST_CASE("negative share is rejected, zero share skipped") {
  BoundsProblem p = two_group(0.4, 0.7, 0.6, 0.0, 1.0);
  p.shares = {1.0, 0.0};
  const BoundsResult r = effect_bounds(p);
  CHECK(!r.effects[0].skipped_zero_share);
  CHECK(r.effects[1].skipped_zero_share);

  p.shares = {1.2, -0.2};
  CHECK_THROWS_AS(effect_bounds(p), Error);
}

TEST_CASE("closed form agrees with the simplex on random problems") {
  Rng rng(404);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t groups = 1 + rng.bounded(5);
    BoundsProblem p = random_problem(rng, groups);
    const BoundsResult closed = effect_bounds(p);
    for (std::size_t k = 0; k < groups; ++k) {
      LpProblem lp;
      lp.n_vars = groups;
      lp.objective.assign(groups, 0.0);
      lp.objective[k] = 1.0;
      lp.lower.assign(groups, p.support_lo);
      lp.upper.assign(groups, p.support_hi);
      LpRow avg;
      avg.coeffs = p.shares;
      avg.rel = LpRelation::Eq;
      avg.rhs = p.untreated_mean_pooled;
      lp.rows.push_back(avg);
      const LpSolution mn = solve_lp(lp);
      const LpSolution mx = maximize_lp(lp);
      REQUIRE(mn.status == LpStatus::Optimal);
      REQUIRE(mx.status == LpStatus::Optimal);
      CHECK(testing::close(closed.effects[k].hi,
                           p.treated_means[k] - mn.objective, 1e-8));
      CHECK(testing::close(closed.effects[k].lo,
                           p.treated_means[k] - mx.objective, 1e-8));
    }
  }
}

TEST_CASE("bounds shrink weakly under tighter support or shape restriction") {
  Rng rng(405);
  for (int rep = 0; rep < 25; ++rep) {
    BoundsProblem p = random_problem(rng, 3);
    const BoundsResult base = effect_bounds(p);

    BoundsProblem tight = p;
    tight.support_lo = p.support_lo + 0.1 * (p.untreated_mean_pooled - p.support_lo);
    tight.support_hi = p.support_hi - 0.1 * (p.support_hi - p.untreated_mean_pooled);
    const BoundsResult tighter = effect_bounds(tight);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(tighter.effects[k].lo >= base.effects[k].lo - 1e-9);
      CHECK(tighter.effects[k].hi <= base.effects[k].hi + 1e-9);
    }

    BoundsProblem shaped = p;
    shaped.shape = ShapeRestriction::DecreasingInLevel;
    try {
      const BoundsResult restricted = effect_bounds(shaped);
      for (std::size_t k = 0; k < 3; ++k) {
        if (restricted.effects[k].skipped_zero_share) continue;
        CHECK(restricted.effects[k].lo >= base.effects[k].lo - 1e-9);
        CHECK(restricted.effects[k].hi <= base.effects[k].hi + 1e-9);
        CHECK(restricted.effects[k].lo <= restricted.effects[k].hi + 1e-9);
      }
    } catch (const Error& e) {
      // The shape restriction can empty the feasible set; that is a valid
      // outcome for a random problem.
      CHECK(e.code() == ErrorCode::InfeasibleProblem);
    }
  }
}

TEST_CASE("joint sign feasibility: worked examples") {
  SUBCASE("positive effects attainable") {
    const BoundsProblem p = two_group(0.4, 0.7, 0.6, 0.0, 1.0);
    const FeasibilityResult r = joint_sign_feasible(p, SignDirection::NonNegative);
    CHECK(r.feasible);
    REQUIRE(r.witness.size() == 2);
    CHECK(testing::close(0.5 * r.witness[0] + 0.5 * r.witness[1], 0.4, 1e-9));
    CHECK(r.witness[0] <= 0.7 + 1e-12);
    CHECK(r.witness[1] <= 0.6 + 1e-12);
  }

  SUBCASE("positive effects unattainable when treated means are low") {
    const BoundsProblem p = two_group(0.4, 0.1, 0.1, 0.0, 1.0);
    const FeasibilityResult r = joint_sign_feasible(p, SignDirection::NonNegative);
    CHECK(!r.feasible);
    CHECK(!r.certificate.empty());
  }

  SUBCASE("the same case is feasible with nonpositive effects") {
    const BoundsProblem p = two_group(0.4, 0.1, 0.1, 0.0, 1.0);
    const FeasibilityResult r = joint_sign_feasible(p, SignDirection::NonPositive);
    CHECK(r.feasible);
    for (double v : r.witness) CHECK(v >= 0.1 - 1e-12);
  }
}

TEST_CASE("joint sign feasibility matches the grid oracle") {
  Rng rng(406);
  for (int rep = 0; rep < 40; ++rep) {
    const BoundsProblem p = random_problem(rng, 2);
    for (auto dir : {SignDirection::NonNegative, SignDirection::NonPositive}) {
      const bool grid = testing::grid_sign_feasible(p, dir, 1e-3);
      const FeasibilityResult r = joint_sign_feasible(p, dir);
      CHECK(r.feasible == grid);
      if (r.feasible) {
        double avg = 0.0;
        for (std::size_t k = 0; k < 2; ++k) avg += p.shares[k] * r.witness[k];
        CHECK(testing::close(avg, p.untreated_mean_pooled, 1e-8));
      }
    }
  }
}

TEST_CASE("strict positivity uses the margin") {
  const BoundsProblem p = two_group(0.65, 0.7, 0.6, 0.0, 1.0);
  // With margin 0 the closure is feasible (Y0 = (0.7, 0.6) attains it).
  CHECK(joint_sign_feasible(p, SignDirection::StrictlyPositive, 0.0).feasible);
  // Demanding effects >= 0.2 pushes the attainable average below the target.
  CHECK(!joint_sign_feasible(p, SignDirection::StrictlyPositive, 0.2).feasible);
}

}  // TEST_SUITE
