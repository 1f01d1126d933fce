#pragma once

#include <cstddef>
#include <vector>

namespace emco {

// Small dense linear programming, sized for a few dozen variables. Solved by
// a two-phase primal simplex with Bland's rule: variables are shifted or
// split to nonnegative form, finite upper bounds become explicit rows, and
// phase one drives artificial variables out of the basis. Intended for the
// treatment-effect bound problems, not for large or sparse instances.
enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class LpRelation { Le, Eq, Ge };

struct LpRow {
  std::vector<double> coeffs;
  LpRelation rel = LpRelation::Le;
  double rhs = 0.0;
};

struct LpProblem {
  std::size_t n_vars = 0;
  std::vector<double> objective;  // minimized
  std::vector<LpRow> rows;
  std::vector<double> lower;  // -inf allowed
  std::vector<double> upper;  // +inf allowed
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

LpSolution solve_lp(const LpProblem& prob);

// Convenience: maximize by negating the objective.
LpSolution maximize_lp(LpProblem prob);

}  // namespace emco
