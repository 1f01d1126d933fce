#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emco {

// Immutable-by-convention data model shared by every estimator and test.
// Treatment values are canonical levels 0..d_max (contiguous); level_labels
// maps each canonical level back to the original column value. The instrument
// is 0/1. Covariates are stored column-major. All vectors share n_rows().
struct Dataset {
  std::vector<double> outcome;
  std::vector<int> treatment;
  std::vector<int> instrument;

  std::vector<double> covariates;  // column-major, n_rows() * covariate_names.size()
  std::vector<std::string> covariate_names;

  std::vector<int> cluster_id;  // canonical 0..n_clusters-1; empty if absent
  std::vector<int> strata_id;   // canonical 0..n_strata-1; empty if absent

  std::vector<double> level_labels;  // strictly increasing, size d_max+1
  std::size_t dropped_rows = 0;      // rows removed by listwise deletion on load

  std::size_t n_rows() const { return outcome.size(); }
  int d_max() const { return static_cast<int>(level_labels.size()) - 1; }
  std::size_t n_levels() const { return level_labels.size(); }
  std::size_t n_covariates() const { return covariate_names.size(); }
  bool has_covariates() const { return !covariate_names.empty(); }
  bool has_cluster() const { return !cluster_id.empty(); }
  bool has_strata() const { return !strata_id.empty(); }

  double x(std::size_t row, std::size_t col) const {
    return covariates[col * n_rows() + row];
  }

  std::size_t n_clusters() const;
  std::size_t n_strata() const;

  // Row subset in the order given. Keeps the level set and labels as-is (no
  // re-canonicalization), so resampled data stay aligned with the original.
  Dataset subset(std::span<const int> rows) const;
};

// Inputs for building a Dataset in memory (simulators, tests). Raw treatment
// values are canonicalized unless the *_with_levels variant is used.
struct DatasetInputs {
  std::vector<double> outcome;
  std::vector<double> treatment;  // raw values
  std::vector<int> instrument;    // 0/1
  std::vector<double> covariates;  // column-major
  std::vector<std::string> covariate_names;
  std::vector<int> cluster_id;
  std::vector<int> strata_id;
};

Dataset build_dataset(DatasetInputs in);

// Treatment already holds canonical levels 0..d_max; levels absent from the
// sample are kept (no relabeling). Labels default to 0..d_max.
Dataset build_dataset_with_levels(DatasetInputs in, int d_max,
                                  std::vector<double> labels = {});

// Column mapping for CSV ingestion, normally filled from CLI flags.
struct CsvSchema {
  std::string outcome;
  std::string treatment;
  std::string instrument;
  std::vector<std::string> covariates;
  std::string cluster;  // empty = none
  std::string strata;   // empty = none

  // Optional ordered-bin upper edges for a continuous treatment column:
  // value v maps to the number of cuts strictly below v (ties go to the
  // lower bin), producing levels 0..cuts.size().
  std::vector<double> treatment_cuts;

  // Optional raw instrument value to map to 1; the other observed value maps
  // to 0. Without it, the lower of the two distinct values becomes 0.
  std::optional<double> instrument_one;
};

// Loads and validates a CSV with a header row. Rows missing any mapped column
// are dropped (listwise deletion) and counted in Dataset::dropped_rows.
// Throws Error with codes MissingColumn, UnparseableCell,
// NonBinaryInstrument, EmptyAfterFiltering, DegenerateTreatment.
Dataset load_csv(const std::string& path, const CsvSchema& schema);

// Writes a Dataset so that load_csv round-trips it exactly (treatment written
// as its original label, doubles with max precision).
void write_csv(const Dataset& data, const std::string& path);

struct ValidationReport {
  std::size_t n = 0;
  int d_max = 0;
  std::size_t n1 = 0, n0 = 0;  // instrument arm sizes
  std::vector<std::array<std::size_t, 2>> cell_counts;  // [level][z]
  double mean_d_z1 = 0.0, mean_d_z0 = 0.0;
  bool relevance_ok = false;  // E[D|Z=1] > E[D|Z=0]
  std::size_t n_clusters = 0;
  std::size_t n_strata = 0;
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;

  std::string to_text() const;
};

// Report-only diagnostics; relevance failure is a warning, never an error.
ValidationReport validate(const Dataset& data);

}  // namespace emco
