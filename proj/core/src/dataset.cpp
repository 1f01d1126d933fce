#include "emco/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_set>

#include "emco/error.hpp"

namespace emco {

namespace {

std::size_t count_distinct(const std::vector<int>& v) {
  std::unordered_set<int> seen(v.begin(), v.end());
  return seen.size();
}

}  // namespace

std::size_t Dataset::n_clusters() const {
  return has_cluster() ? count_distinct(cluster_id) : 0;
}

std::size_t Dataset::n_strata() const {
  return has_strata() ? count_distinct(strata_id) : 0;
}

Dataset Dataset::subset(std::span<const int> rows) const {
  Dataset out;
  const std::size_t m = rows.size();
  out.level_labels = level_labels;
  out.covariate_names = covariate_names;
  out.outcome.reserve(m);
  out.treatment.reserve(m);
  out.instrument.reserve(m);
  for (int r : rows) {
    out.outcome.push_back(outcome[r]);
    out.treatment.push_back(treatment[r]);
    out.instrument.push_back(instrument[r]);
  }
  if (has_covariates()) {
    const std::size_t k = n_covariates();
    out.covariates.resize(m * k);
    for (std::size_t c = 0; c < k; ++c) {
      const double* col = covariates.data() + c * n_rows();
      double* dst = out.covariates.data() + c * m;
      for (std::size_t i = 0; i < m; ++i) dst[i] = col[rows[i]];
    }
  }
  if (has_cluster()) {
    out.cluster_id.reserve(m);
    for (int r : rows) out.cluster_id.push_back(cluster_id[r]);
  }
  if (has_strata()) {
    out.strata_id.reserve(m);
    for (int r : rows) out.strata_id.push_back(strata_id[r]);
  }
  return out;
}

namespace {

void check_common(const DatasetInputs& in) {
  const std::size_t n = in.outcome.size();
  if (n == 0) fail(ErrorCode::EmptyAfterFiltering, "dataset has no rows");
  if (in.treatment.size() != n || in.instrument.size() != n)
    fail(ErrorCode::InvalidArgument, "outcome/treatment/instrument lengths differ");
  if (!in.cluster_id.empty() && in.cluster_id.size() != n)
    fail(ErrorCode::InvalidArgument, "cluster_id length mismatch");
  if (!in.strata_id.empty() && in.strata_id.size() != n)
    fail(ErrorCode::InvalidArgument, "strata_id length mismatch");
  if (in.covariates.size() != in.covariate_names.size() * n)
    fail(ErrorCode::InvalidArgument, "covariate matrix size mismatch");
  bool has0 = false, has1 = false;
  for (int z : in.instrument) {
    if (z == 0) has0 = true;
    else if (z == 1) has1 = true;
    else fail(ErrorCode::NonBinaryInstrument, "instrument value outside {0,1}");
  }
  if (!has0 || !has1)
    fail(ErrorCode::NonBinaryInstrument, "instrument must take both values 0 and 1");
}

std::vector<int> canonicalize_ids(const std::vector<int>& raw) {
  std::map<int, int> remap;
  for (int v : raw) remap.emplace(v, 0);
  int next = 0;
  for (auto& [key, id] : remap) id = next++;
  std::vector<int> out;
  out.reserve(raw.size());
  for (int v : raw) out.push_back(remap.at(v));
  return out;
}

}  // namespace

Dataset build_dataset(DatasetInputs in) {
  check_common(in);

  std::vector<double> levels(in.treatment);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2)
    fail(ErrorCode::DegenerateTreatment,
         "treatment must take at least two distinct values");

  Dataset out;
  out.outcome = std::move(in.outcome);
  out.instrument = std::move(in.instrument);
  out.level_labels = levels;
  out.treatment.reserve(in.treatment.size());
  for (double v : in.treatment) {
    const auto it = std::lower_bound(levels.begin(), levels.end(), v);
    out.treatment.push_back(static_cast<int>(it - levels.begin()));
  }
  out.covariates = std::move(in.covariates);
  out.covariate_names = std::move(in.covariate_names);
  if (!in.cluster_id.empty()) out.cluster_id = canonicalize_ids(in.cluster_id);
  if (!in.strata_id.empty()) out.strata_id = canonicalize_ids(in.strata_id);
  return out;
}

Dataset build_dataset_with_levels(DatasetInputs in, int d_max,
                                  std::vector<double> labels) {
  check_common(in);
  if (d_max < 1) fail(ErrorCode::DegenerateTreatment, "d_max must be >= 1");
  if (labels.empty()) {
    labels.resize(static_cast<std::size_t>(d_max) + 1);
    for (int d = 0; d <= d_max; ++d) labels[d] = d;
  }
  if (static_cast<int>(labels.size()) != d_max + 1)
    fail(ErrorCode::InvalidArgument, "level label count must be d_max+1");

  Dataset out;
  out.outcome = std::move(in.outcome);
  out.instrument = std::move(in.instrument);
  out.level_labels = std::move(labels);
  out.treatment.reserve(in.treatment.size());
  for (double v : in.treatment) {
    const int d = static_cast<int>(v);
    if (d < 0 || d > d_max || static_cast<double>(d) != v)
      fail(ErrorCode::InvalidArgument, "treatment outside canonical levels");
    out.treatment.push_back(d);
  }
  out.covariates = std::move(in.covariates);
  out.covariate_names = std::move(in.covariate_names);
  if (!in.cluster_id.empty()) out.cluster_id = canonicalize_ids(in.cluster_id);
  if (!in.strata_id.empty()) out.strata_id = canonicalize_ids(in.strata_id);
  return out;
}

ValidationReport validate(const Dataset& data) {
  ValidationReport rep;
  rep.n = data.n_rows();
  rep.d_max = data.d_max();
  rep.dropped_rows = data.dropped_rows;
  rep.cell_counts.assign(data.n_levels(), {0, 0});

  double sum_d1 = 0.0, sum_d0 = 0.0;
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const int z = data.instrument[i];
    rep.cell_counts[data.treatment[i]][z] += 1;
    if (z == 1) {
      rep.n1 += 1;
      sum_d1 += data.treatment[i];
    } else {
      rep.n0 += 1;
      sum_d0 += data.treatment[i];
    }
  }
  rep.mean_d_z1 = rep.n1 ? sum_d1 / static_cast<double>(rep.n1) : 0.0;
  rep.mean_d_z0 = rep.n0 ? sum_d0 / static_cast<double>(rep.n0) : 0.0;
  rep.relevance_ok = rep.mean_d_z1 > rep.mean_d_z0;
  if (!rep.relevance_ok)
    rep.warnings.push_back("relevance fails: E[D|Z=1] <= E[D|Z=0]");
  for (std::size_t d = 0; d < rep.cell_counts.size(); ++d) {
    if (rep.cell_counts[d][0] + rep.cell_counts[d][1] == 0) {
      rep.warnings.push_back("no observations at treatment level " +
                             std::to_string(d));
    }
  }
  rep.n_clusters = data.n_clusters();
  rep.n_strata = data.n_strata();
  if (data.dropped_rows > 0)
    rep.warnings.push_back(std::to_string(data.dropped_rows) +
                           " rows dropped for missing values");
  return rep;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "rows: " << n << " (dropped " << dropped_rows << ")\n";
  os << "treatment levels: 0.." << d_max << "\n";
  os << "instrument arms: n1=" << n1 << " n0=" << n0 << "\n";
  os << "E[D|Z=1]=" << mean_d_z1 << "  E[D|Z=0]=" << mean_d_z0
     << (relevance_ok ? "  (relevance ok)" : "  (RELEVANCE FAILS)") << "\n";
  os << "cells (level: z=0 / z=1):\n";
  for (std::size_t d = 0; d < cell_counts.size(); ++d)
    os << "  " << d << ": " << cell_counts[d][0] << " / " << cell_counts[d][1]
       << "\n";
  if (n_clusters) os << "clusters: " << n_clusters << "\n";
  if (n_strata) os << "strata: " << n_strata << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

}  // namespace emco
