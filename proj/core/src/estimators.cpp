#include "emco/estimators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "emco/error.hpp"
#include "emco/parallel.hpp"
#include "emco/rng.hpp"
#include "emco/stats.hpp"

namespace emco {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ArmSums {
  std::size_t n1 = 0, n0 = 0;
  double sum1 = 0.0, sum0 = 0.0;
};

// Difference of arm means of an arbitrary per-observation series.
double delta_mean(const Dataset& data, std::span<const double> series,
                  std::size_t* n1_out = nullptr, std::size_t* n0_out = nullptr) {
  ArmSums s;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    if (data.instrument[i] == 1) {
      s.n1 += 1;
      s.sum1 += series[i];
    } else {
      s.n0 += 1;
      s.sum0 += series[i];
    }
  }
  if (s.n1 == 0 || s.n0 == 0)
    fail(ErrorCode::DegenerateArm, "an instrument arm is empty");
  if (n1_out) *n1_out = s.n1;
  if (n0_out) *n0_out = s.n0;
  return s.sum1 / static_cast<double>(s.n1) - s.sum0 / static_cast<double>(s.n0);
}

}  // namespace

FirstStageDiffs first_stage_diffs(const Dataset& data) {
  FirstStageDiffs out;
  const std::size_t levels = data.n_levels();
  std::vector<std::size_t> c1(levels, 0), c0(levels, 0);
  double sum_d1 = 0.0, sum_d0 = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const int d = data.treatment[i];
    if (data.instrument[i] == 1) {
      ++out.n1;
      ++c1[d];
      sum_d1 += d;
    } else {
      ++out.n0;
      ++c0[d];
      sum_d0 += d;
    }
  }
  if (out.n1 == 0 || out.n0 == 0)
    fail(ErrorCode::DegenerateArm, "an instrument arm is empty");
  out.n = data.n_rows();
  out.p_hat = static_cast<double>(out.n1) / static_cast<double>(out.n);
  out.delta_pr.resize(levels);
  const double inv1 = 1.0 / static_cast<double>(out.n1);
  const double inv0 = 1.0 / static_cast<double>(out.n0);
  for (std::size_t d = 0; d < levels; ++d)
    out.delta_pr[d] = static_cast<double>(c1[d]) * inv1 -
                      static_cast<double>(c0[d]) * inv0;
  out.delta_mean_d = sum_d1 * inv1 - sum_d0 * inv0;
  for (std::size_t d = 1; d < levels; ++d) out.delta_any += out.delta_pr[d];
  return out;
}

std::vector<double> acr_weights(const FirstStageDiffs& fs) {
  const std::size_t levels = fs.delta_pr.size();
  std::vector<double> cdf(levels, 0.0);  // index d-1 holds the D>=d difference
  double running = 0.0;
  for (std::size_t d = levels; d-- > 1;) {
    running += fs.delta_pr[d];
    cdf[d - 1] = running;
  }
  cdf.resize(levels - 1);
  double total = 0.0;
  for (double v : cdf) total += v;
  if (total == 0.0)
    fail(ErrorCode::ZeroFirstStage, "dose weights undefined: zero mean shift");
  for (double& v : cdf) v /= total;
  return cdf;
}

std::string WaldTarget::label() const {
  switch (kind) {
    case Kind::RawTreatment: return "acr";
    case Kind::AnyTreatment: return "recoded";
    case Kind::LevelTreated: return "treated_mean(d=" + std::to_string(level) + ")";
    case Kind::UntreatedPooled: return "untreated_mean";
    case Kind::CovariateLevel:
      return "covariate_mean(d=" + std::to_string(level) +
             ",k=" + std::to_string(covariate) + ")";
  }
  return "?";
}

std::pair<std::vector<double>, std::vector<double>> wald_series(
    const Dataset& data, const WaldTarget& target) {
  const std::size_t n = data.n_rows();
  std::vector<double> y(n), w(n);
  switch (target.kind) {
    case WaldTarget::Kind::RawTreatment:
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = data.outcome[i];
        w[i] = data.treatment[i];
      }
      break;
    case WaldTarget::Kind::AnyTreatment:
      for (std::size_t i = 0; i < n; ++i) {
        y[i] = data.outcome[i];
        w[i] = data.treatment[i] > 0 ? 1.0 : 0.0;
      }
      break;
    case WaldTarget::Kind::LevelTreated: {
      if (target.level < 1 || target.level > data.d_max())
        fail(ErrorCode::InvalidArgument, "treated_mean level out of range");
      for (std::size_t i = 0; i < n; ++i) {
        const double ind = data.treatment[i] == target.level ? 1.0 : 0.0;
        y[i] = data.outcome[i] * ind;
        w[i] = ind;
      }
      break;
    }
    case WaldTarget::Kind::UntreatedPooled:
      for (std::size_t i = 0; i < n; ++i) {
        const double ind = data.treatment[i] == 0 ? 1.0 : 0.0;
        y[i] = data.outcome[i] * ind;
        w[i] = ind;
      }
      break;
    case WaldTarget::Kind::CovariateLevel: {
      if (target.level < 1 || target.level > data.d_max())
        fail(ErrorCode::InvalidArgument, "covariate_mean level out of range");
      if (target.covariate < 0 ||
          static_cast<std::size_t>(target.covariate) >= data.n_covariates())
        fail(ErrorCode::InvalidArgument, "covariate index out of range");
      for (std::size_t i = 0; i < n; ++i) {
        const double ind = data.treatment[i] == target.level ? 1.0 : 0.0;
        y[i] = data.x(i, target.covariate) * ind;
        w[i] = ind;
      }
      break;
    }
  }
  return {std::move(y), std::move(w)};
}

WaldEstimate wald(const Dataset& data, const WaldTarget& target) {
  auto [y, w] = wald_series(data, target);
  WaldEstimate out;
  out.n = data.n_rows();
  out.reduced_form = delta_mean(data, y);
  out.first_stage = delta_mean(data, w);
  if (out.first_stage == 0.0)
    fail(ErrorCode::ZeroFirstStage,
         "first stage is zero for target " + target.label());
  out.value = out.reduced_form / out.first_stage;

  // HC0 sandwich for the just-identified IV ratio with intercept.
  const std::size_t n = data.n_rows();
  double zbar = 0.0, ybar = 0.0, wbar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    zbar += data.instrument[i];
    ybar += y[i];
    wbar += w[i];
  }
  zbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);
  wbar /= static_cast<double>(n);
  const double alpha = ybar - out.value * wbar;
  double szw = 0.0, meat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zt = data.instrument[i] - zbar;
    const double u = y[i] - alpha - out.value * w[i];
    szw += zt * (w[i] - wbar);
    meat += zt * zt * u * u;
  }
  if (szw != 0.0) out.se = std::sqrt(meat) / std::abs(szw);
  return out;
}

ComplierDecomposition complier_decomposition(const Dataset& data) {
  const FirstStageDiffs fs = first_stage_diffs(data);
  if (fs.delta_any <= 0.0)
    fail(ErrorCode::ZeroFirstStage,
         "Pr(D>0|Z=1) - Pr(D>0|Z=0) must be positive");

  const std::size_t n = data.n_rows();
  const std::size_t levels = data.n_levels();
  // Reduced forms of Y*1(D=d) per level.
  std::vector<double> sum1(levels, 0.0), sum0(levels, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const int d = data.treatment[i];
    if (data.instrument[i] == 1) sum1[d] += data.outcome[i];
    else sum0[d] += data.outcome[i];
  }
  std::vector<double> rf(levels);
  for (std::size_t d = 0; d < levels; ++d)
    rf[d] = sum1[d] / static_cast<double>(fs.n1) -
            sum0[d] / static_cast<double>(fs.n0);

  ComplierDecomposition out;
  out.n = n;
  out.total_complier_share = fs.delta_any;
  double rf_total = 0.0;
  for (double v : rf) rf_total += v;
  out.beta_recoded = rf_total / fs.delta_any;
  // delta_pr[0] < 0 under any first stage, so the ratio is well defined.
  if (fs.delta_pr[0] == 0.0)
    fail(ErrorCode::ZeroFirstStage, "no first stage at level 0");
  out.untreated_mean_pooled = rf[0] / fs.delta_pr[0];

  out.levels.reserve(levels - 1);
  for (std::size_t d = 1; d < levels; ++d) {
    LevelMean lm;
    lm.level = static_cast<int>(d);
    lm.delta_pr = fs.delta_pr[d];
    lm.share = fs.delta_pr[d] / fs.delta_any;
    lm.defined = fs.delta_pr[d] > 0.0;
    lm.value = lm.defined ? rf[d] / fs.delta_pr[d] : kNaN;
    out.levels.push_back(std::move(lm));
  }
  return out;
}

namespace {

// Packs the decomposition into a flat vector for bootstrapping:
// [beta_recoded, untreated, total_share, means (d=1..), shares (d=1..)].
std::vector<double> pack_decomposition(const ComplierDecomposition& dec) {
  std::vector<double> v;
  v.reserve(3 + 2 * dec.levels.size());
  v.push_back(dec.beta_recoded);
  v.push_back(dec.untreated_mean_pooled);
  v.push_back(dec.total_complier_share);
  for (const auto& lm : dec.levels) v.push_back(lm.defined ? lm.value : kNaN);
  for (const auto& lm : dec.levels) v.push_back(lm.share);
  return v;
}

}  // namespace

ComplierDecomposition complier_decomposition_with_se(const Dataset& data,
                                                     std::size_t B,
                                                     std::uint64_t seed,
                                                     unsigned threads) {
  ComplierDecomposition dec = complier_decomposition(data);
  const std::size_t k = dec.levels.size();
  const BootstrapSummary boot = cluster_bootstrap(
      data,
      [](const Dataset& d) { return pack_decomposition(complier_decomposition(d)); },
      B, seed, 0.95, threads);
  dec.beta_recoded_se = boot.se[0];
  dec.untreated_se = boot.se[1];
  dec.total_share_se = boot.se[2];
  for (std::size_t j = 0; j < k; ++j) {
    if (boot.n_valid[3 + j] > 1) dec.levels[j].se = boot.se[3 + j];
    dec.levels[j].share_se = boot.se[3 + k + j];
  }
  return dec;
}

double kappa_estimate(
    const Dataset& data, KappaVariant variant, int level,
    const std::function<double(const Dataset&, std::size_t)>& g) {
  const std::size_t n = data.n_rows();
  std::size_t n1 = 0;
  for (int z : data.instrument) n1 += z;
  if (n1 == 0 || n1 == n)
    fail(ErrorCode::DegenerateArm, "an instrument arm is empty");
  const double p = static_cast<double>(n1) / static_cast<double>(n);
  const double pq = p * (1.0 - p);

  if (variant == KappaVariant::TreatedLevel &&
      (level < 1 || level > data.d_max()))
    fail(ErrorCode::InvalidArgument, "kappa level out of range");

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = data.instrument[i];
    const double any = data.treatment[i] > 0 ? 1.0 : 0.0;
    double w = 0.0;
    switch (variant) {
      case KappaVariant::AllCompliers:
        w = 1.0 - (1.0 - any) * z / p - any * (1.0 - z) / (1.0 - p);
        break;
      case KappaVariant::TreatedLevel:
        w = (data.treatment[i] == level ? 1.0 : 0.0) * (z - p) / pq;
        break;
      case KappaVariant::UntreatedPooled:
        w = (1.0 - any) * ((1.0 - z) - (1.0 - p)) / pq;
        break;
    }
    num += w * g(data, i);
    den += w;
  }
  if (den == 0.0)
    fail(ErrorCode::ZeroFirstStage, "kappa-weighted complier share is zero");
  return num / den;
}

namespace {

// Design matrix [1 | covariates | strata dummies (first stratum dropped)].
Eigen::MatrixXd fwl_design(const Dataset& data) {
  const std::size_t n = data.n_rows();
  const std::size_t k = data.n_covariates();
  const std::size_t s = data.has_strata() ? data.n_strata() : 0;
  const std::size_t cols = 1 + k + (s > 1 ? s - 1 : 0);
  Eigen::MatrixXd m(n, cols);
  m.col(0).setOnes();
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t i = 0; i < n; ++i) m(i, 1 + c) = data.x(i, c);
  if (s > 1) {
    m.rightCols(s - 1).setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const int id = data.strata_id[i];
      if (id > 0) m(i, k + static_cast<std::size_t>(id)) = 1.0;
    }
  }
  return m;
}

// Rank cutoff scaled by the row count, so an exactly collinear column is
// flagged even after accumulated Householder rounding.
void set_rank_threshold(Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                        Eigen::Index rows) {
  qr.setThreshold(std::numeric_limits<double>::epsilon() *
                  static_cast<double>(rows));
}

Eigen::VectorXd residualize_z(const Dataset& data) {
  const std::size_t n = data.n_rows();
  const Eigen::MatrixXd m = fwl_design(data);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  set_rank_threshold(qr, m.rows());
  if (qr.rank() < m.cols())
    fail(ErrorCode::RankDeficientCovariates,
         "covariate/strata design is rank deficient (rank " +
             std::to_string(qr.rank()) + " of " + std::to_string(m.cols()) + ")");
  Eigen::VectorXd z(n);
  for (std::size_t i = 0; i < n; ++i) z(i) = data.instrument[i];
  return z - m * qr.solve(z);
}

}  // namespace

double fwl_coef(const Dataset& data, std::span<const double> target) {
  const Eigen::VectorXd zt = residualize_z(data);
  const Eigen::Map<const Eigen::VectorXd> t(target.data(), target.size());
  const double denom = zt.squaredNorm();
  if (denom == 0.0)
    fail(ErrorCode::RankDeficientCovariates,
         "instrument is collinear with covariates");
  return zt.dot(t) / denom;
}

double ols_coef_on_z(const Dataset& data, std::span<const double> target) {
  const std::size_t n = data.n_rows();
  const Eigen::MatrixXd m = fwl_design(data);
  Eigen::MatrixXd g(n, m.cols() + 1);
  for (std::size_t i = 0; i < n; ++i) g(i, 0) = data.instrument[i];
  g.rightCols(m.cols()) = m;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(g);
  set_rank_threshold(qr, g.rows());
  if (qr.rank() < g.cols())
    fail(ErrorCode::RankDeficientCovariates,
         "design including the instrument is rank deficient");
  const Eigen::Map<const Eigen::VectorXd> t(target.data(), target.size());
  const Eigen::VectorXd beta = qr.solve(t);
  return beta(0);
}

WaldEstimate fwl_adjust(const Dataset& data, const WaldTarget& target) {
  auto [y, w] = wald_series(data, target);
  const Eigen::VectorXd zt = residualize_z(data);
  const double denom = zt.squaredNorm();
  if (denom == 0.0)
    fail(ErrorCode::RankDeficientCovariates,
         "instrument is collinear with covariates");
  const Eigen::Map<const Eigen::VectorXd> ym(y.data(), y.size());
  const Eigen::Map<const Eigen::VectorXd> wm(w.data(), w.size());
  WaldEstimate out;
  out.n = data.n_rows();
  out.reduced_form = zt.dot(ym) / denom;
  out.first_stage = zt.dot(wm) / denom;
  if (out.first_stage == 0.0)
    fail(ErrorCode::ZeroFirstStage,
         "adjusted first stage is zero for target " + target.label());
  out.value = out.reduced_form / out.first_stage;
  return out;
}

BootstrapSummary cluster_bootstrap(
    const Dataset& data,
    const std::function<std::vector<double>(const Dataset&)>& stat,
    std::size_t B, std::uint64_t seed, double ci_level, unsigned threads) {
  if (B < 2) fail(ErrorCode::InvalidArgument, "bootstrap needs B >= 2");
  const std::vector<std::vector<int>> groups =
      resampling_groups(data.cluster_id, data.n_rows());
  const std::size_t n_groups = groups.size();

  const std::vector<double> point = stat(data);
  const std::size_t k = point.size();

  std::vector<std::vector<double>> draws(B);
  parallel_for(B, threads, [&](std::size_t b) {
    Rng rng(derive_seed(seed, 0xB007u, b));
    std::vector<int> rows;
    rows.reserve(data.n_rows());
    for (std::size_t c = 0; c < n_groups; ++c) {
      const auto& g = groups[rng.bounded(n_groups)];
      rows.insert(rows.end(), g.begin(), g.end());
    }
    try {
      draws[b] = stat(data.subset(rows));
      if (draws[b].size() != k) draws[b].assign(k, kNaN);
    } catch (const Error&) {
      draws[b].assign(k, kNaN);
    }
  });

  BootstrapSummary out;
  out.B = B;
  out.se.assign(k, 0.0);
  out.ci_lo.assign(k, 0.0);
  out.ci_hi.assign(k, 0.0);
  out.n_valid.assign(k, 0);
  std::vector<double> column;
  column.reserve(B);
  const double tail = (1.0 - ci_level) / 2.0;
  for (std::size_t j = 0; j < k; ++j) {
    column.clear();
    for (std::size_t b = 0; b < B; ++b) {
      const double v = draws[b][j];
      if (!std::isnan(v)) column.push_back(v);
    }
    out.n_valid[j] = column.size();
    if (column.empty()) {
      out.se[j] = kNaN;
      out.ci_lo[j] = kNaN;
      out.ci_hi[j] = kNaN;
      continue;
    }
    std::sort(column.begin(), column.end());
    out.se[j] = sample_sd(column);
    out.ci_lo[j] = quantile_type1(column, tail);
    out.ci_hi[j] = quantile_type1(column, 1.0 - tail);
  }
  return out;
}

ScalarBootstrap cluster_bootstrap_se(
    const Dataset& data, const std::function<double(const Dataset&)>& stat,
    std::size_t B, std::uint64_t seed, double ci_level, unsigned threads) {
  const BootstrapSummary s = cluster_bootstrap(
      data,
      [&stat](const Dataset& d) { return std::vector<double>{stat(d)}; }, B,
      seed, ci_level, threads);
  return {s.se[0], s.ci_lo[0], s.ci_hi[0], s.n_valid[0]};
}

}  // namespace emco
