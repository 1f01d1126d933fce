#include "emco/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emco/error.hpp"

namespace emco {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-9;

// How each original variable maps onto nonnegative simplex variables.
struct VarSub {
  enum class Kind { Shift, Flip, Split } kind;
  double offset = 0.0;       // l for Shift, u for Flip
  std::size_t col = 0;       // primary column
  std::size_t col_neg = 0;   // negative part for Split
};

// Dense tableau simplex on: min cost.t  s.t.  A t = b, t >= 0, b >= 0.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), a_(rows * cols, 0.0), b_(rows, 0.0),
        cost_(cols, 0.0), basis_(rows, -1), banned_(cols, false) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
  double& rhs(std::size_t r) { return b_[r]; }
  double& cost(std::size_t c) { return cost_[c]; }
  void set_basis(std::size_t r, int col) { basis_[r] = col; }
  int basis(std::size_t r) const { return basis_[r]; }
  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  void ban(std::size_t c) { banned_[c] = true; }

  // Runs simplex iterations with Bland's rule. Returns false on unbounded.
  bool optimize() {
    const std::size_t max_iters = 200 * (m_ + n_) + 1000;
    for (std::size_t iter = 0; iter <= max_iters; ++iter) {
      if (iter == max_iters)
        fail(ErrorCode::InvalidArgument, "simplex iteration limit exceeded");
      // Reduced costs r_j = c_j - c_B . B^-1 A_j; the tableau is kept in
      // canonical form, so r_j = cost_[j] directly after price-out.
      int enter = -1;
      for (std::size_t j = 0; j < n_; ++j) {
        if (banned_[j]) continue;
        if (cost_[j] < -kTol) {
          enter = static_cast<int>(j);
          break;  // Bland: smallest index
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best_ratio = kInf;
      for (std::size_t r = 0; r < m_; ++r) {
        const double coef = at(r, enter);
        if (coef > kTol) {
          const double ratio = b_[r] / coef;
          if (ratio < best_ratio - kTol ||
              (ratio < best_ratio + kTol &&
               (leave < 0 || basis_[r] < basis_[leave]))) {
            best_ratio = ratio;
            leave = static_cast<int>(r);
          }
        }
      }
      if (leave < 0) return false;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
    }
    return true;  // unreachable
  }

  void pivot(std::size_t r, std::size_t c) {
    const double piv = at(r, c);
    for (std::size_t j = 0; j < n_; ++j) at(r, j) /= piv;
    b_[r] /= piv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
      b_[i] -= f * b_[r];
      if (b_[i] < 0.0 && b_[i] > -kTol) b_[i] = 0.0;
    }
    const double fc = cost_[c];
    if (fc != 0.0) {
      for (std::size_t j = 0; j < n_; ++j) cost_[j] -= fc * at(r, j);
      cost_[c] = 0.0;
      objective_ -= fc * b_[r];
    }
    basis_[r] = static_cast<int>(c);
  }

  // Re-derives the cost row for a new objective over the current basis.
  void load_costs(const std::vector<double>& c) {
    cost_ = c;
    objective_ = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const int bc = basis_[r];
      const double f = cost_[bc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) cost_[j] -= f * at(r, j);
      cost_[bc] = 0.0;
      objective_ -= f * b_[r];
    }
  }

  double objective() const { return -objective_; }

  double basic_value(std::size_t col) const {
    for (std::size_t r = 0; r < m_; ++r)
      if (basis_[r] == static_cast<int>(col)) return b_[r];
    return 0.0;
  }

  // Removes a redundant row (used when an artificial cannot be pivoted out).
  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<long>(r * n_),
             a_.begin() + static_cast<long>((r + 1) * n_));
    b_.erase(b_.begin() + static_cast<long>(r));
    basis_.erase(basis_.begin() + static_cast<long>(r));
    m_ -= 1;
  }

 private:
  std::size_t m_, n_;
  std::vector<double> a_, b_, cost_;
  std::vector<int> basis_;
  std::vector<bool> banned_;
  double objective_ = 0.0;  // running -(c_B . x_B)
};

}  // namespace

LpSolution solve_lp(const LpProblem& prob) {
  const std::size_t nv = prob.n_vars;
  if (prob.objective.size() != nv || prob.lower.size() != nv ||
      prob.upper.size() != nv)
    fail(ErrorCode::InvalidArgument, "lp dimensions inconsistent");
  for (const LpRow& row : prob.rows)
    if (row.coeffs.size() != nv)
      fail(ErrorCode::InvalidArgument, "lp row dimension mismatch");
  for (std::size_t j = 0; j < nv; ++j)
    if (prob.lower[j] > prob.upper[j]) return {LpStatus::Infeasible, 0.0, {}};

  // Variable substitutions to nonnegative form.
  std::vector<VarSub> subs(nv);
  std::size_t n_t = 0;
  for (std::size_t j = 0; j < nv; ++j) {
    const double l = prob.lower[j], u = prob.upper[j];
    if (l > -kInf) {
      subs[j] = {VarSub::Kind::Shift, l, n_t++, 0};
    } else if (u < kInf) {
      subs[j] = {VarSub::Kind::Flip, u, n_t++, 0};
    } else {
      subs[j] = {VarSub::Kind::Split, 0.0, n_t, n_t + 1};
      n_t += 2;
    }
  }

  // Assemble rows over t-variables: original rows plus upper-bound rows.
  struct TRow {
    std::vector<double> coeffs;
    LpRelation rel;
    double rhs;
  };
  std::vector<TRow> rows;
  rows.reserve(prob.rows.size() + nv);
  for (const LpRow& row : prob.rows) {
    TRow tr{std::vector<double>(n_t, 0.0), row.rel, row.rhs};
    for (std::size_t j = 0; j < nv; ++j) {
      const double a = row.coeffs[j];
      if (a == 0.0) continue;
      switch (subs[j].kind) {
        case VarSub::Kind::Shift:
          tr.coeffs[subs[j].col] += a;
          tr.rhs -= a * subs[j].offset;
          break;
        case VarSub::Kind::Flip:
          tr.coeffs[subs[j].col] -= a;
          tr.rhs -= a * subs[j].offset;
          break;
        case VarSub::Kind::Split:
          tr.coeffs[subs[j].col] += a;
          tr.coeffs[subs[j].col_neg] -= a;
          break;
      }
    }
    rows.push_back(std::move(tr));
  }
  for (std::size_t j = 0; j < nv; ++j) {
    if (subs[j].kind == VarSub::Kind::Shift && prob.upper[j] < kInf) {
      TRow tr{std::vector<double>(n_t, 0.0), LpRelation::Le,
              prob.upper[j] - prob.lower[j]};
      tr.coeffs[subs[j].col] = 1.0;
      rows.push_back(std::move(tr));
    }
  }

  // Objective over t-variables (the shift constants drop out because the
  // final objective is recomputed from the mapped-back solution).
  std::vector<double> obj_t(n_t, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const double c = prob.objective[j];
    if (c == 0.0) continue;
    switch (subs[j].kind) {
      case VarSub::Kind::Shift:
        obj_t[subs[j].col] += c;
        break;
      case VarSub::Kind::Flip:
        obj_t[subs[j].col] -= c;
        break;
      case VarSub::Kind::Split:
        obj_t[subs[j].col] += c;
        obj_t[subs[j].col_neg] -= c;
        break;
    }
  }

  // Standard form columns: t-vars, slacks, artificials.
  const std::size_t m = rows.size();
  std::size_t n_slack = 0;
  for (const TRow& r : rows)
    if (r.rel != LpRelation::Eq) ++n_slack;
  const std::size_t n_cols = n_t + n_slack + m;

  Tableau tab(m, n_cols);
  std::size_t slack_at = n_t;
  for (std::size_t r = 0; r < m; ++r) {
    double sign = rows[r].rhs < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n_t; ++j)
      tab.at(r, j) = sign * rows[r].coeffs[j];
    tab.rhs(r) = sign * rows[r].rhs;
    if (rows[r].rel != LpRelation::Eq) {
      const double s = rows[r].rel == LpRelation::Le ? 1.0 : -1.0;
      tab.at(r, slack_at++) = sign * s;
    }
    tab.at(r, n_t + n_slack + r) = 1.0;  // artificial, basic at start
    tab.set_basis(r, static_cast<int>(n_t + n_slack + r));
  }

  // Phase 1: minimize the artificial sum.
  std::vector<double> phase1(n_cols, 0.0);
  for (std::size_t r = 0; r < m; ++r) phase1[n_t + n_slack + r] = 1.0;
  tab.load_costs(phase1);
  if (!tab.optimize())
    fail(ErrorCode::InvalidArgument, "phase-1 simplex reported unbounded");
  if (tab.objective() > 1e-7) return {LpStatus::Infeasible, 0.0, {}};

  // Pivot lingering artificials out of the basis or drop redundant rows.
  for (std::size_t r = tab.rows(); r-- > 0;) {
    const int bc = tab.basis(r);
    if (static_cast<std::size_t>(bc) < n_t + n_slack) continue;
    bool pivoted = false;
    for (std::size_t j = 0; j < n_t + n_slack && !pivoted; ++j) {
      if (std::abs(tab.at(r, j)) > kTol) {
        tab.pivot(r, j);
        pivoted = true;
      }
    }
    if (!pivoted) tab.drop_row(r);
  }
  for (std::size_t c = n_t + n_slack; c < n_cols; ++c) tab.ban(c);

  // Phase 2.
  std::vector<double> phase2(n_cols, 0.0);
  for (std::size_t j = 0; j < n_t; ++j) phase2[j] = obj_t[j];
  tab.load_costs(phase2);
  if (!tab.optimize()) return {LpStatus::Unbounded, 0.0, {}};

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.x.resize(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    switch (subs[j].kind) {
      case VarSub::Kind::Shift:
        sol.x[j] = subs[j].offset + tab.basic_value(subs[j].col);
        break;
      case VarSub::Kind::Flip:
        sol.x[j] = subs[j].offset - tab.basic_value(subs[j].col);
        break;
      case VarSub::Kind::Split:
        sol.x[j] =
            tab.basic_value(subs[j].col) - tab.basic_value(subs[j].col_neg);
        break;
    }
  }
  sol.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j)
    sol.objective += prob.objective[j] * sol.x[j];
  return sol;
}

LpSolution maximize_lp(LpProblem prob) {
  for (double& c : prob.objective) c = -c;
  LpSolution sol = solve_lp(prob);
  sol.objective = -sol.objective;
  return sol;
}

}  // namespace emco
