#include "emco/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "emco/error.hpp"
#include "emco/stats.hpp"

namespace emco {

namespace {

void finalize(Moment& m) {
  m.mean = mean(m.contrib);
  m.sd = sample_sd(m.contrib);
}

double sample_p_hat(const Dataset& data) {
  std::size_t n1 = 0;
  for (int z : data.instrument) n1 += z;
  if (n1 == 0 || n1 == data.n_rows())
    fail(ErrorCode::DegenerateArm, "an instrument arm is empty");
  return static_cast<double>(n1) / static_cast<double>(data.n_rows());
}

std::string format_edge(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

OutcomeSet full_support_set() {
  OutcomeSet s;
  s.label = "all";
  return s;
}

std::vector<OutcomeSet> quantile_partition(const Dataset& data, std::size_t k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "partition needs k >= 1");
  std::vector<double> sorted(data.outcome);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> cuts;
  for (std::size_t j = 1; j < k; ++j) {
    const double c =
        quantile_type1(sorted, static_cast<double>(j) / static_cast<double>(k));
    if (c >= sorted.back()) continue;  // would create an empty top bin
    if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
  }

  std::vector<OutcomeSet> out;
  const double inf = std::numeric_limits<double>::infinity();
  double lo = -inf;
  for (double c : cuts) {
    out.push_back({"y<=" + format_edge(c) +
                       (lo == -inf ? "" : " & y>" + format_edge(lo)),
                   lo, c});
    lo = c;
  }
  out.push_back({lo == -inf ? "all-y" : "y>" + format_edge(lo), lo, inf});
  return out;
}

MomentSet build_emco_moments(const Dataset& data,
                             std::vector<OutcomeSet> partition) {
  const std::size_t n = data.n_rows();
  const double p = sample_p_hat(data);
  const double w1 = 1.0 / p;          // weight on Z=1 rows
  const double w0 = 1.0 / (1.0 - p);  // weight on Z=0 rows

  partition.push_back(full_support_set());

  MomentSet out;
  out.n = n;
  out.cluster_id = data.cluster_id;
  out.moments.reserve(partition.size() * data.n_levels());

  for (const OutcomeSet& set : partition) {
    const bool full = set.is_full_support();
    for (int d = 0; d <= data.d_max(); ++d) {
      Moment m;
      m.label = "d=" + std::to_string(d) + "|A=" + set.label;
      m.provenance = d == 0 ? (full ? "level-mass(d=0)" : "joint-mass(d=0)")
                            : (full ? "level-mass" : "joint-mass");
      m.contrib.resize(n);
      bool any_in_set = false;
      for (std::size_t i = 0; i < n; ++i) {
        const double in_set = set.contains(data.outcome[i]) ? 1.0 : 0.0;
        any_in_set = any_in_set || in_set > 0.0;
        const double ind = (data.treatment[i] == d ? 1.0 : 0.0) * in_set;
        const double signed_weight =
            data.instrument[i] == 1 ? w1 : -w0;  // Z/p - (1-Z)/(1-p)
        // d = 0 keeps the natural orientation; d > 0 flips it so every
        // stored moment is a <=0 restriction.
        m.contrib[i] = (d == 0 ? ind : -ind) * signed_weight;
      }
      m.empty_set = !any_in_set;
      finalize(m);
      out.moments.push_back(std::move(m));
    }
  }
  return out;
}

MomentSet build_late_cdf_moments(const Dataset& data) {
  const std::size_t n = data.n_rows();
  const double p = sample_p_hat(data);
  const double w1 = 1.0 / p;
  const double w0 = 1.0 / (1.0 - p);

  MomentSet out;
  out.n = n;
  out.cluster_id = data.cluster_id;
  const int d_max = data.d_max();
  out.moments.reserve(2 * static_cast<std::size_t>(d_max));

  // -(Pr(D>=d|Z=1) - Pr(D>=d|Z=0)) <= 0 for d = 1..d_max.
  for (int d = 1; d <= d_max; ++d) {
    Moment m;
    m.label = "cdf:d>=" + std::to_string(d);
    m.provenance = "cdf-monotonicity";
    m.contrib.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ge = data.treatment[i] >= d ? 1.0 : 0.0;
      m.contrib[i] = ge * (data.instrument[i] == 1 ? -w1 : w0);
    }
    finalize(m);
    out.moments.push_back(std::move(m));
  }

  // Adjacent-difference form: the d vs d+1 CDF gap telescopes to the level
  // mass at d, so these contributions coincide with the level moments.
  for (int d = 1; d <= d_max; ++d) {
    Moment m;
    m.label = "cdf-adjacent:d=" + std::to_string(d);
    m.provenance = "cdf-adjacent";
    m.contrib.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double ge_d = data.treatment[i] >= d ? 1.0 : 0.0;
      const double ge_next = data.treatment[i] >= d + 1 ? 1.0 : 0.0;
      m.contrib[i] = -(ge_d - ge_next) *
                     (data.instrument[i] == 1 ? w1 : -w0);
    }
    finalize(m);
    out.moments.push_back(std::move(m));
  }
  return out;
}

MomentSet interact_with_covariates(const MomentSet& ms, const Dataset& data,
                                   std::span<const int> cells) {
  if (cells.size() != ms.n)
    fail(ErrorCode::InvalidArgument, "cell vector length mismatch");
  int n_cells = 0;
  for (int c : cells) {
    if (c < 0) fail(ErrorCode::InvalidArgument, "negative cell id");
    n_cells = std::max(n_cells, c + 1);
  }
  if (n_cells <= 1) return ms;

  MomentSet out;
  out.n = ms.n;
  out.cluster_id = data.cluster_id;
  out.moments.reserve(ms.size() * static_cast<std::size_t>(n_cells));
  for (const Moment& base : ms.moments) {
    for (int c = 0; c < n_cells; ++c) {
      Moment m;
      m.label = base.label + "|cell=" + std::to_string(c);
      m.provenance = base.provenance;
      m.contrib.resize(ms.n);
      bool any = false;
      for (std::size_t i = 0; i < ms.n; ++i) {
        const bool in_cell = cells[i] == c;
        m.contrib[i] = in_cell ? base.contrib[i] : 0.0;
        any = any || (in_cell && base.contrib[i] != 0.0);
      }
      m.empty_set = base.empty_set || !any;
      finalize(m);
      out.moments.push_back(std::move(m));
    }
  }
  return out;
}

std::vector<int> strata_cells(const Dataset& data) {
  if (!data.has_strata())
    fail(ErrorCode::InvalidArgument, "dataset has no strata column");
  return data.strata_id;
}

}  // namespace emco
