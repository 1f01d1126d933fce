#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "emco/bounds.hpp"
#include "emco/estimators.hpp"
#include "emco/inference.hpp"
#include "emco/simulate.hpp"

namespace emco::cli {

using nlohmann::json;

// Machine-readable run report: every command writes one on success so any
// printed number can be reproduced from the echoed config and seed.
struct RunReport {
  std::string command;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  json config;
  json results;
  std::vector<std::string> warnings;
  double timing_ms = 0.0;

  json to_json() const;
};

// Writes <out_dir>/emco_<command>_report.json and returns the path.
std::string write_report(const std::string& out_dir, const RunReport& report);

json to_json(const WaldEstimate& est);
json to_json(const ComplierDecomposition& dec,
             const std::vector<double>& level_labels);
json to_json(const TestResult& res);
json to_json(const BoundsResult& res);
json to_json(const FeasibilityResult& res);
json to_json(const PowerCell& cell);

// Rebuilds bounds inputs from a decompose report payload.
BoundsProblem bounds_problem_from_json(const json& decomposition,
                                       double support_lo, double support_hi,
                                       ShapeRestriction shape);

// Fixed-width numeric table for terminal output.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string to_string() const;

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v, int precision = 4);

}  // namespace emco::cli
