#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "emco/dataset.hpp"
#include "emco/error.hpp"

namespace emco {

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes and
// strips a trailing \r from CRLF input.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // ignore
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}

bool is_missing(const std::string& cell) {
  if (cell.empty()) return true;
  static const char* markers[] = {"NA", "na", "N/A", "NaN", "nan",
                                  "NULL", "null", "."};
  for (const char* m : markers)
    if (cell == m) return true;
  return false;
}

double parse_cell(const std::string& cell, const std::string& column,
                  std::size_t line_no) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    fail(ErrorCode::UnparseableCell, "cannot parse '" + cell + "' in column '" +
                                         column + "' at line " +
                                         std::to_string(line_no));
  return value;
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end())
    fail(ErrorCode::MissingColumn, "column '" + name + "' not found in header");
  return static_cast<std::size_t>(it - header.begin());
}

int bin_level(double v, const std::vector<double>& cuts) {
  int level = 0;
  for (double c : cuts) {
    if (v > c) ++level;  // ties go to the lower bin
  }
  return level;
}

// Distinct labels -> 0..C-1. Sorted numerically when every label parses as a
// number (so integer ids written by write_csv round-trip), lexicographically
// otherwise.
std::vector<int> canonicalize_labels(const std::vector<std::string>& raw) {
  std::map<std::string, int> remap;
  for (const auto& v : raw) remap.emplace(v, 0);

  std::vector<std::string> keys;
  keys.reserve(remap.size());
  for (const auto& [key, id] : remap) keys.push_back(key);

  bool all_numeric = true;
  std::vector<double> values(keys.size());
  for (std::size_t i = 0; i < keys.size() && all_numeric; ++i) {
    const char* begin = keys[i].data();
    const char* end = begin + keys[i].size();
    auto [ptr, ec] = std::from_chars(begin, end, values[i]);
    all_numeric = ec == std::errc{} && ptr == end;
  }
  if (all_numeric) {
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    for (std::size_t rank = 0; rank < order.size(); ++rank)
      remap[keys[order[rank]]] = static_cast<int>(rank);
  } else {
    int next = 0;
    for (auto& [key, id] : remap) id = next++;
  }

  std::vector<int> out;
  out.reserve(raw.size());
  for (const auto& v : raw) out.push_back(remap.at(v));
  return out;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream file(path);
  if (!file)
    fail(ErrorCode::InvalidArgument, "cannot open file: " + path);

  std::string line;
  if (!std::getline(file, line))
    fail(ErrorCode::EmptyAfterFiltering, "file is empty: " + path);
  const std::vector<std::string> header = split_csv(line);

  const std::size_t yc = find_column(header, schema.outcome);
  const std::size_t dc = find_column(header, schema.treatment);
  const std::size_t zc = find_column(header, schema.instrument);
  std::vector<std::size_t> xc;
  for (const auto& name : schema.covariates) xc.push_back(find_column(header, name));
  const bool want_cluster = !schema.cluster.empty();
  const bool want_strata = !schema.strata.empty();
  const std::size_t cc = want_cluster ? find_column(header, schema.cluster) : 0;
  const std::size_t sc = want_strata ? find_column(header, schema.strata) : 0;

  std::vector<double> y, d_raw, z_raw;
  std::vector<std::vector<double>> x_cols(xc.size());
  std::vector<std::string> cluster_raw, strata_raw;
  std::size_t dropped = 0;

  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> cells = split_csv(line);
    auto cell_at = [&](std::size_t idx) -> const std::string& {
      static const std::string empty;
      return idx < cells.size() ? cells[idx] : empty;
    };

    bool missing = is_missing(cell_at(yc)) || is_missing(cell_at(dc)) ||
                   is_missing(cell_at(zc));
    for (std::size_t j = 0; j < xc.size() && !missing; ++j)
      missing = is_missing(cell_at(xc[j]));
    if (!missing && want_cluster) missing = is_missing(cell_at(cc));
    if (!missing && want_strata) missing = is_missing(cell_at(sc));
    if (missing) {
      ++dropped;
      continue;
    }

    y.push_back(parse_cell(cell_at(yc), schema.outcome, line_no));
    double dv = parse_cell(cell_at(dc), schema.treatment, line_no);
    if (!schema.treatment_cuts.empty()) dv = bin_level(dv, schema.treatment_cuts);
    d_raw.push_back(dv);
    z_raw.push_back(parse_cell(cell_at(zc), schema.instrument, line_no));
    for (std::size_t j = 0; j < xc.size(); ++j)
      x_cols[j].push_back(parse_cell(cell_at(xc[j]), schema.covariates[j], line_no));
    if (want_cluster) cluster_raw.push_back(cell_at(cc));
    if (want_strata) strata_raw.push_back(cell_at(sc));
  }

  if (y.empty())
    fail(ErrorCode::EmptyAfterFiltering,
         "no usable rows in " + path + " (" + std::to_string(dropped) +
             " dropped)");

  // Map the instrument column onto {0,1}.
  std::vector<double> z_values(z_raw);
  std::sort(z_values.begin(), z_values.end());
  z_values.erase(std::unique(z_values.begin(), z_values.end()), z_values.end());
  if (z_values.size() != 2)
    fail(ErrorCode::NonBinaryInstrument,
         "instrument column '" + schema.instrument + "' has " +
             std::to_string(z_values.size()) + " distinct values (need 2)");
  double one_value = z_values[1];
  if (schema.instrument_one) {
    if (*schema.instrument_one != z_values[0] &&
        *schema.instrument_one != z_values[1])
      fail(ErrorCode::NonBinaryInstrument,
           "instrument value mapped to 1 does not occur in column '" +
               schema.instrument + "'");
    one_value = *schema.instrument_one;
  }
  std::vector<int> z;
  z.reserve(z_raw.size());
  for (double v : z_raw) z.push_back(v == one_value ? 1 : 0);

  DatasetInputs in;
  in.outcome = std::move(y);
  in.treatment = std::move(d_raw);
  in.instrument = std::move(z);
  in.covariate_names = schema.covariates;
  const std::size_t n = in.outcome.size();
  in.covariates.reserve(n * x_cols.size());
  for (auto& col : x_cols)
    in.covariates.insert(in.covariates.end(), col.begin(), col.end());
  if (want_cluster) in.cluster_id = canonicalize_labels(cluster_raw);
  if (want_strata) in.strata_id = canonicalize_labels(strata_raw);

  Dataset out = build_dataset(std::move(in));
  out.dropped_rows = dropped;
  return out;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream file(path);
  if (!file) fail(ErrorCode::InvalidArgument, "cannot open for writing: " + path);

  file << "y,d,z";
  for (const auto& name : data.covariate_names) file << ',' << name;
  if (data.has_cluster()) file << ",cluster";
  if (data.has_strata()) file << ",strata";
  file << '\n';

  char buf[40];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    file << buf;
  };
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    put(data.outcome[i]);
    file << ',';
    put(data.level_labels[data.treatment[i]]);
    file << ',' << data.instrument[i];
    for (std::size_t c = 0; c < data.n_covariates(); ++c) {
      file << ',';
      put(data.x(i, c));
    }
    if (data.has_cluster()) file << ',' << data.cluster_id[i];
    if (data.has_strata()) file << ',' << data.strata_id[i];
    file << '\n';
  }
}

}  // namespace emco
