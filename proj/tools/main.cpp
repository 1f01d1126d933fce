#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emco/bounds.hpp"
#include "emco/dataset.hpp"
#include "emco/error.hpp"
#include "emco/estimators.hpp"
#include "emco/inference.hpp"
#include "emco/moments.hpp"
#include "emco/parallel.hpp"
#include "emco/simulate.hpp"
#include "report.hpp"

using namespace emco;
using emco::cli::format_number;
using emco::cli::RunReport;
using emco::cli::TextTable;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GlobalOptions {
  std::uint64_t seed = 12345;
  unsigned threads = 0;
  std::string out_dir = ".";
};

struct DataOptions {
  std::string csv_path;
  std::string y, d, z;
  std::string x_list;
  std::string cluster, strata;
  std::string bins;
  double z_one = std::numeric_limits<double>::quiet_NaN();
};

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> split_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "inf" || item == "+inf") {
      out.push_back(kInf);
    } else if (item == "-inf") {
      out.push_back(-kInf);
    } else {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        fail(ErrorCode::InvalidArgument,
             std::string("cannot parse ") + what + " entry '" + item + "'");
      }
    }
  }
  return out;
}

void add_data_options(CLI::App* cmd, DataOptions& opt) {
  cmd->add_option("csv", opt.csv_path, "input CSV file")->required();
  cmd->add_option("--y", opt.y, "outcome column")->required();
  cmd->add_option("--d", opt.d, "ordered treatment column")->required();
  cmd->add_option("--z", opt.z, "binary instrument column")->required();
  cmd->add_option("--x", opt.x_list, "comma-separated covariate columns");
  cmd->add_option("--cluster", opt.cluster, "cluster id column (bootstrap resampling unit)");
  cmd->add_option("--strata", opt.strata, "strata id column (fixed-effect cells)");
  cmd->add_option("--bins", opt.bins,
                  "comma-separated ascending cut points binning the treatment "
                  "(value <= cut falls in the lower bin)");
  cmd->add_option("--z-one", opt.z_one, "raw instrument value to map to 1");
}

Dataset load_data(const DataOptions& opt) {
  CsvSchema schema;
  schema.outcome = opt.y;
  schema.treatment = opt.d;
  schema.instrument = opt.z;
  schema.covariates = split_names(opt.x_list);
  schema.cluster = opt.cluster;
  schema.strata = opt.strata;
  if (!opt.bins.empty()) schema.treatment_cuts = split_doubles(opt.bins, "--bins");
  if (!std::isnan(opt.z_one)) schema.instrument_one = opt.z_one;
  return load_csv(opt.csv_path, schema);
}

json echo_data_config(const DataOptions& opt, const Dataset& data) {
  return json{{"csv", opt.csv_path},
              {"y", opt.y},
              {"d", opt.d},
              {"z", opt.z},
              {"x", split_names(opt.x_list)},
              {"cluster", opt.cluster},
              {"strata", opt.strata},
              {"bins", opt.bins},
              {"n", data.n_rows()},
              {"d_max", data.d_max()},
              {"dropped_rows", data.dropped_rows}};
}

std::string level_header(const Dataset& data, int level) {
  return "d=" + std::to_string(level) + " (" +
         format_number(data.level_labels[level], 6) + ")";
}

// ---------------------------------------------------------------------------
// estimate

int run_estimate(const GlobalOptions& global, const DataOptions& data_opt,
                 const std::string& se_mode, std::size_t B) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(data_opt);
  const bool adjusted = data.has_covariates() || data.has_strata();

  struct Row {
    std::string name;
    WaldEstimate est;
  };
  std::vector<Row> rows;
  rows.push_back({"acr", wald(data, WaldTarget::acr())});
  rows.push_back({"recoded", wald(data, WaldTarget::recoded())});
  if (adjusted) {
    rows.push_back({"acr.adjusted", fwl_adjust(data, WaldTarget::acr())});
    rows.push_back({"recoded.adjusted", fwl_adjust(data, WaldTarget::recoded())});
  }

  if (se_mode == "bootstrap") {
    auto stat = [&](const Dataset& d) {
      std::vector<double> v;
      v.push_back(wald(d, WaldTarget::acr()).value);
      v.push_back(wald(d, WaldTarget::recoded()).value);
      if (adjusted) {
        v.push_back(fwl_adjust(d, WaldTarget::acr()).value);
        v.push_back(fwl_adjust(d, WaldTarget::recoded()).value);
      }
      return v;
    };
    const BootstrapSummary boot =
        cluster_bootstrap(data, stat, B, global.seed, 0.95, global.threads);
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].est.se = boot.se[r];
  } else if (se_mode == "none") {
    for (Row& r : rows) r.est.se.reset();
  }

  TextTable table({"target", "estimate", "se", "reduced form", "first stage"});
  json results;
  for (const Row& r : rows) {
    table.add_row({r.name, format_number(r.est.value),
                   r.est.se ? format_number(*r.est.se) : "--",
                   format_number(r.est.reduced_form),
                   format_number(r.est.first_stage)});
    results[r.name] = emco::cli::to_json(r.est);
  }
  std::cout << table.to_string();
  results["acr_dose_weights"] = acr_weights(first_stage_diffs(data));

  RunReport report;
  report.command = "estimate";
  report.seed = global.seed;
  report.threads = global.threads;
  report.config = echo_data_config(data_opt, data);
  report.config["se"] = se_mode;
  report.config["B"] = B;
  report.results = results;
  for (const auto& w : validate(data).warnings) report.warnings.push_back(w);
  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// decompose

int run_decompose(const GlobalOptions& global, const DataOptions& data_opt,
                  std::size_t B) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(data_opt);
  const ComplierDecomposition dec =
      complier_decomposition_with_se(data, B, global.seed, global.threads);

  std::vector<std::string> header = {"", "2sls(any)", "untreated(pooled)"};
  for (const LevelMean& lm : dec.levels)
    header.push_back(level_header(data, lm.level));
  TextTable table(header);

  std::vector<std::string> est_row = {"complier mean / effect",
                                      format_number(dec.beta_recoded),
                                      format_number(dec.untreated_mean_pooled)};
  std::vector<std::string> se_row = {
      "(se)",
      dec.beta_recoded_se ? "(" + format_number(*dec.beta_recoded_se) + ")" : "--",
      dec.untreated_se ? "(" + format_number(*dec.untreated_se) + ")" : "--"};
  std::vector<std::string> share_row = {"share of compliers", "", "1"};
  std::vector<std::string> share_se_row = {"(share se)", "", ""};
  for (const LevelMean& lm : dec.levels) {
    est_row.push_back(lm.defined ? format_number(lm.value) : "undefined");
    se_row.push_back(lm.se ? "(" + format_number(*lm.se) + ")" : "--");
    share_row.push_back(format_number(lm.share));
    share_se_row.push_back(lm.share_se ? "(" + format_number(*lm.share_se) + ")"
                                       : "--");
  }
  table.add_row(est_row);
  table.add_row(se_row);
  table.add_row(share_row);
  table.add_row(share_se_row);
  std::cout << table.to_string();
  std::cout << "total complier share: " << format_number(dec.total_complier_share)
            << "   n: " << dec.n << "\n";

  RunReport report;
  report.command = "decompose";
  report.seed = global.seed;
  report.threads = global.threads;
  report.config = echo_data_config(data_opt, data);
  report.config["B"] = B;
  report.results["decomposition"] = emco::cli::to_json(dec, data.level_labels);
  for (const LevelMean& lm : dec.levels) {
    if (!lm.defined)
      report.warnings.push_back("treated mean undefined at level " +
                                std::to_string(lm.level) + " (delta_pr = " +
                                format_number(lm.delta_pr) + ")");
  }
  for (const auto& w : validate(data).warnings) report.warnings.push_back(w);
  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// test

int run_test(const GlobalOptions& global, const DataOptions& data_opt,
             const std::string& method, double alpha, std::size_t B,
             double beta, std::size_t deciles, bool include_cdf) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(data_opt);

  MomentSet ms = build_emco_moments(data, quantile_partition(data, deciles));
  if (include_cdf) {
    MomentSet cdf = build_late_cdf_moments(data);
    for (Moment& m : cdf.moments) ms.moments.push_back(std::move(m));
  }
  if (data.has_strata())
    ms = interact_with_covariates(ms, data, strata_cells(data));

  const double beta_n = beta > 0 ? beta : alpha / 10.0;
  const TestResult res =
      method == "cck"
          ? cck_test(ms, alpha, B, beta_n, global.seed, global.threads)
          : rsw_test(ms, alpha, B, beta_n, global.seed, global.threads);

  std::cout << "method: " << to_string(res.method) << "   moments: " << res.p
            << "   n: " << res.n << "\n";
  std::cout << "T_n = " << format_number(res.statistic, 6)
            << "   critical value (alpha=" << alpha
            << ") = " << format_number(res.critical_value, 6) << "\n";
  std::cout << (res.reject ? "REJECT: the data are inconsistent with "
                             "extensive-margin-only compliance\n"
                           : "no rejection at this level\n");

  // Top violations by studentized value.
  std::vector<const MomentDiagnostic*> ranked;
  for (const MomentDiagnostic& d : res.per_moment)
    if (!d.excluded) ranked.push_back(&d);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto* a, const auto* b) { return a->t > b->t; });
  TextTable table({"moment", "mean", "sd", "t"});
  for (std::size_t i = 0; i < ranked.size() && i < 5; ++i)
    table.add_row({ranked[i]->label, format_number(ranked[i]->mean),
                   format_number(ranked[i]->sd), format_number(ranked[i]->t)});
  std::cout << "most violated moments:\n" << table.to_string();

  RunReport report;
  report.command = "test";
  report.seed = global.seed;
  report.threads = global.threads;
  report.config = echo_data_config(data_opt, data);
  report.config["method"] = method;
  report.config["alpha"] = alpha;
  report.config["beta_n"] = beta_n;
  report.config["B"] = B;
  report.config["deciles"] = deciles;
  report.config["include_cdf"] = include_cdf;
  report.results["test"] = emco::cli::to_json(res);
  report.warnings = res.warnings;
  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int run_bounds(const GlobalOptions& global, const DataOptions& data_opt,
               const std::string& from_json, const std::string& support,
               const std::string& shape, const std::string& sign,
               double margin, std::size_t B) {
  const auto t0 = std::chrono::steady_clock::now();

  const ShapeRestriction restriction = shape == "decreasing"
                                           ? ShapeRestriction::DecreasingInLevel
                                           : ShapeRestriction::None;
  RunReport report;
  report.command = "bounds";
  report.seed = global.seed;
  report.threads = global.threads;

  BoundsProblem problem;
  std::vector<double> labels;
  if (!from_json.empty()) {
    std::ifstream f(from_json);
    if (!f) fail(ErrorCode::InvalidArgument, "cannot open " + from_json);
    json doc = json::parse(f, nullptr, true, true);
    const json& dec = doc.contains("results")
                          ? doc.at("results").at("decomposition")
                          : doc;
    double lo = -kInf, hi = kInf;
    if (!support.empty()) {
      const std::vector<double> s = split_doubles(support, "--support");
      if (s.size() != 2)
        fail(ErrorCode::InvalidArgument, "--support needs lo,hi");
      lo = s[0];
      hi = s[1];
    } else {
      fail(ErrorCode::InvalidArgument,
           "--support is required with --from-json (no data to infer it from)");
    }
    problem = emco::cli::bounds_problem_from_json(dec, lo, hi, restriction);
    report.config["from_json"] = from_json;
  } else {
    const Dataset data = load_data(data_opt);
    const ComplierDecomposition dec =
        complier_decomposition_with_se(data, B, global.seed, global.threads);
    double lo, hi;
    if (!support.empty()) {
      const std::vector<double> s = split_doubles(support, "--support");
      if (s.size() != 2)
        fail(ErrorCode::InvalidArgument, "--support needs lo,hi");
      lo = s[0];
      hi = s[1];
    } else {
      lo = *std::min_element(data.outcome.begin(), data.outcome.end());
      hi = *std::max_element(data.outcome.begin(), data.outcome.end());
      report.warnings.push_back(
          "outcome support assumed equal to the observed sample range [" +
          format_number(lo) + ", " + format_number(hi) + "]");
    }
    problem = BoundsProblem::from_decomposition(dec, lo, hi, restriction);
    labels = data.level_labels;
    report.config = echo_data_config(data_opt, data);
    report.results["decomposition"] = emco::cli::to_json(dec, data.level_labels);
  }
  report.config["support"] = {problem.support_lo, problem.support_hi};
  report.config["shape"] = shape;

  const BoundsResult bounds = effect_bounds(problem);
  TextTable table({"level", "share", "treated mean", "effect lo", "effect hi"});
  for (const EffectBound& eb : bounds.effects) {
    const std::size_t k = static_cast<std::size_t>(eb.level) - 1;
    if (eb.skipped_zero_share) {
      table.add_row({std::to_string(eb.level), format_number(problem.shares[k]),
                     "--", "skipped", "skipped"});
      continue;
    }
    table.add_row({std::to_string(eb.level), format_number(problem.shares[k]),
                   format_number(problem.treated_means[k]),
                   format_number(eb.lo), format_number(eb.hi)});
  }
  std::cout << table.to_string();
  const bool informative =
      std::any_of(bounds.effects.begin(), bounds.effects.end(),
                  [](const EffectBound& e) { return e.informative; });
  if (!informative)
    std::cout << "bounds are uninformative (unbounded outcome support)\n";
  report.results["bounds"] = emco::cli::to_json(bounds);

  if (!sign.empty()) {
    SignDirection dir;
    if (sign == "pos") dir = SignDirection::NonNegative;
    else if (sign == "neg") dir = SignDirection::NonPositive;
    else dir = SignDirection::StrictlyPositive;
    const FeasibilityResult feas = joint_sign_feasible(problem, dir, margin);
    std::cout << "joint sign (" << sign << "): "
              << (feas.feasible ? "feasible" : "infeasible") << "\n";
    if (!feas.feasible) std::cout << "  " << feas.certificate << "\n";
    report.config["sign"] = sign;
    report.config["margin"] = margin;
    report.results["joint_sign"] = emco::cli::to_json(feas);
  }

  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

std::vector<SimConfig> parse_grid(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::InvalidArgument, "cannot open grid file " + path);
  std::string line;
  std::vector<std::string> header;
  std::vector<SimConfig> grid;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = split_names(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    auto value = [&](const std::string& name,
                     std::optional<double> fallback) -> double {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name && i < cells.size()) return std::stod(cells[i]);
      if (fallback) return *fallback;
      fail(ErrorCode::InvalidArgument, "grid file misses column " + name);
    };
    const double e1 = value("dext1", std::nullopt);
    const double e2 = value("dext2", std::nullopt);
    const double di = value("dint", std::nullopt);
    const double dy = value("dy", 0.0);
    SimConfig cfg;
    const bool has_a =
        std::find(header.begin(), header.end(), "a") != header.end();
    if (has_a) {
      cfg = SimConfig::with_baseline(value("a", std::nullopt),
                                     value("b", std::nullopt), e1, e2, di, dy);
    } else {
      cfg = SimConfig::uniform_noncompliers(e1, e2, di, dy);
    }
    cfg.n_obs = static_cast<std::size_t>(value("n_obs", 1000.0));
    cfg.n_sims = static_cast<std::size_t>(value("n_sims", 1000.0));
    grid.push_back(cfg);
  }
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "grid file has no rows");
  return grid;
}

int run_simulate(const GlobalOptions& global, const std::string& grid_path,
                 const std::string& method, double alpha, std::size_t B,
                 std::size_t deciles, const std::string& out_csv) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SimConfig> grid = parse_grid(grid_path);
  const TestMethod tm = method == "cck" ? TestMethod::Cck : TestMethod::Rsw;
  const std::vector<PowerCell> cells =
      power_curve(grid, tm, alpha, B, global.seed, global.threads, deciles);

  const std::string path =
      out_csv.empty() ? global.out_dir + "/emco_sim_results.csv" : out_csv;
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + path);
  out << "cell,method,dext1,dext2,dint,dy,a,b,n_obs,n_sims,alpha,B,"
         "reject_rate,binom_se,n_errors\n";
  TextTable table({"cell", "dint", "dy", "reject", "se", "errors"});
  json results = json::array();
  for (const PowerCell& cell : cells) {
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%zu,%s,%g,%g,%g,%g,%g,%g,%zu,%zu,%g,%zu,%.6f,%.6f,%zu\n",
                  cell.index, to_string(cell.method), cell.cfg.delta_ext1,
                  cell.cfg.delta_ext2, cell.cfg.delta_int, cell.cfg.delta_y,
                  cell.cfg.a, cell.cfg.b, cell.cfg.n_obs, cell.cfg.n_sims,
                  alpha, B, cell.reject_rate, cell.binom_se, cell.n_errors);
    out << buf;
    table.add_row({std::to_string(cell.index), format_number(cell.cfg.delta_int),
                   format_number(cell.cfg.delta_y),
                   format_number(cell.reject_rate),
                   format_number(cell.binom_se),
                   std::to_string(cell.n_errors)});
    results.push_back(emco::cli::to_json(cell));
  }
  std::cout << table.to_string();
  std::cout << "results: " << path << "\n";

  RunReport report;
  report.command = "simulate";
  report.seed = global.seed;
  report.threads = global.threads;
  report.config["grid"] = grid_path;
  report.config["method"] = method;
  report.config["alpha"] = alpha;
  report.config["B"] = B;
  report.config["deciles"] = deciles;
  report.config["out"] = path;
  report.results["cells"] = results;
  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// plotdata

int run_plotdata(const GlobalOptions& global, const DataOptions& data_opt,
                 std::size_t deciles, std::size_t B, const std::string& prefix) {
  const auto t0 = std::chrono::steady_clock::now();
  const Dataset data = load_data(data_opt);
  const std::vector<OutcomeSet> partition = quantile_partition(data, deciles);
  const std::size_t levels = data.n_levels();

  // Natural-sign series: per-level mass differences, then per (level, set)
  // joint-mass differences.
  auto series = [&partition, levels](const Dataset& d) {
    const FirstStageDiffs fs = first_stage_diffs(d);
    std::vector<double> v(fs.delta_pr);
    std::size_t n1 = 0, n0 = 0;
    for (int z : d.instrument) (z ? n1 : n0) += 1;
    for (const OutcomeSet& set : partition) {
      for (std::size_t level = 0; level < levels; ++level) {
        double s1 = 0.0, s0 = 0.0;
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
          if (d.treatment[i] == static_cast<int>(level) &&
              set.contains(d.outcome[i])) {
            if (d.instrument[i] == 1) s1 += 1.0;
            else s0 += 1.0;
          }
        }
        v.push_back(s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0));
      }
    }
    return v;
  };

  const std::vector<double> point = series(data);
  const BootstrapSummary boot =
      cluster_bootstrap(data, series, B, global.seed, 0.95, global.threads);

  const std::string base =
      prefix.empty() ? global.out_dir + "/emco_plotdata" : prefix;
  const std::string levels_path = base + "_levels.csv";
  const std::string sets_path = base + "_sets.csv";

  {
    std::ofstream out(levels_path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + levels_path);
    out << "# per-level treatment-mass difference Pr(D=d|Z=1)-Pr(D=d|Z=0) "
           "with bootstrap percentile bands\n";
    out << "level,label,delta_pr,lo,hi\n";
    for (std::size_t d = 0; d < levels; ++d) {
      out << d << ',' << format_number(data.level_labels[d], 10) << ','
          << format_number(point[d], 10) << ',' << format_number(boot.ci_lo[d], 10)
          << ',' << format_number(boot.ci_hi[d], 10) << '\n';
    }
  }
  {
    std::ofstream out(sets_path);
    if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + sets_path);
    out << "# joint outcome/treatment mass difference "
           "Pr(Y in A, D=d|Z=1)-Pr(Y in A, D=d|Z=0) per outcome bin\n";
    out << "level,label,set,delta_mass,lo,hi\n";
    std::size_t idx = levels;
    for (const OutcomeSet& set : partition) {
      for (std::size_t d = 0; d < levels; ++d, ++idx) {
        out << d << ',' << format_number(data.level_labels[d], 10) << ',' << '"'
            << set.label << '"' << ',' << format_number(point[idx], 10) << ','
            << format_number(boot.ci_lo[idx], 10) << ','
            << format_number(boot.ci_hi[idx], 10) << '\n';
      }
    }
  }
  std::cout << "wrote " << levels_path << " and " << sets_path << "\n";

  RunReport report;
  report.command = "plotdata";
  report.seed = global.seed;
  report.threads = global.threads;
  report.config = echo_data_config(data_opt, data);
  report.config["deciles"] = deciles;
  report.config["B"] = B;
  report.results["levels_csv"] = levels_path;
  report.results["sets_csv"] = sets_path;
  report.timing_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  std::cout << "report: " << emco::cli::write_report(global.out_dir, report)
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "emco: instrumental-variable analysis of ordered treatments under "
      "extensive-margin-only compliance"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_version_flag("--version", "emco 0.1.0");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "seed for all randomized procedures");
  app.add_option("--threads", global.threads,
                 "worker threads (0 = EMCO_THREADS env or hardware)");
  app.add_option("--out-dir", global.out_dir, "directory for reports");

  // estimate
  DataOptions est_data;
  std::string est_se = "robust";
  std::size_t est_B = 1000;
  CLI::App* estimate =
      app.add_subcommand("estimate", "Wald estimates: ordered and any-treatment");
  add_data_options(estimate, est_data);
  estimate->add_option("--se", est_se, "robust|bootstrap|none")
      ->check(CLI::IsMember({"robust", "bootstrap", "none"}));
  estimate->add_option("--B", est_B, "bootstrap replications");

  // decompose
  DataOptions dec_data;
  std::size_t dec_B = 1000;
  CLI::App* decompose = app.add_subcommand(
      "decompose", "complier shares, treated means and the pooled untreated mean");
  add_data_options(decompose, dec_data);
  decompose->add_option("--B", dec_B, "bootstrap replications for the ses");

  // test
  DataOptions test_data;
  std::string test_method = "rsw";
  double test_alpha = 0.05, test_beta = 0.0;
  std::size_t test_B = 1000, test_deciles = 10;
  bool test_cdf = false;
  CLI::App* test = app.add_subcommand(
      "test", "moment-inequality test of extensive-margin-only compliance");
  add_data_options(test, test_data);
  test->add_option("--method", test_method, "rsw|cck")
      ->check(CLI::IsMember({"rsw", "cck"}));
  test->add_option("--alpha", test_alpha, "test level");
  test->add_option("--beta", test_beta, "first-stage level (default alpha/10)");
  test->add_option("--B", test_B, "bootstrap replications");
  test->add_option("--deciles", test_deciles, "outcome partition bins");
  test->add_flag("--include-cdf", test_cdf,
                 "also include the instrument-monotonicity CDF moments");

  // bounds
  DataOptions bounds_data;
  std::string bounds_from, bounds_support, bounds_shape = "none",
                           bounds_sign;
  double bounds_margin = 0.0;
  std::size_t bounds_B = 500;
  CLI::App* bounds = app.add_subcommand(
      "bounds", "partial identification of per-level treatment effects");
  bounds->add_option("csv", bounds_data.csv_path, "input CSV file");
  bounds->add_option("--y", bounds_data.y, "outcome column");
  bounds->add_option("--d", bounds_data.d, "treatment column");
  bounds->add_option("--z", bounds_data.z, "instrument column");
  bounds->add_option("--x", bounds_data.x_list, "covariate columns");
  bounds->add_option("--cluster", bounds_data.cluster, "cluster id column");
  bounds->add_option("--strata", bounds_data.strata, "strata id column");
  bounds->add_option("--bins", bounds_data.bins, "treatment bin cuts");
  bounds->add_option("--z-one", bounds_data.z_one, "instrument value mapped to 1");
  bounds->add_option("--from-json", bounds_from,
                     "decompose report to read instead of data");
  bounds->add_option("--support", bounds_support,
                     "outcome support lo,hi (inf allowed)");
  bounds->add_option("--shape", bounds_shape, "none|decreasing")
      ->check(CLI::IsMember({"none", "decreasing"}));
  bounds->add_option("--sign", bounds_sign,
                     "joint sign feasibility: pos|neg|strict-pos")
      ->check(CLI::IsMember({"pos", "neg", "strict-pos"}));
  bounds->add_option("--margin", bounds_margin,
                     "margin for the strict-pos direction");
  bounds->add_option("--B", bounds_B, "bootstrap replications");

  // simulate
  std::string sim_grid, sim_method = "rsw", sim_out;
  double sim_alpha = 0.05;
  std::size_t sim_B = 1000, sim_deciles = 10;
  CLI::App* simulate =
      app.add_subcommand("simulate", "size/power study over a config grid");
  simulate->add_option("--grid", sim_grid, "grid file (CSV of DGP cells)")
      ->required();
  simulate->add_option("--method", sim_method, "rsw|cck")
      ->check(CLI::IsMember({"rsw", "cck"}));
  simulate->add_option("--alpha", sim_alpha, "test level");
  simulate->add_option("--B", sim_B, "bootstrap replications per test");
  simulate->add_option("--deciles", sim_deciles, "outcome partition bins");
  simulate->add_option("--out", sim_out, "output CSV path");

  // plotdata
  DataOptions plot_data;
  std::size_t plot_deciles = 10, plot_B = 500;
  std::string plot_prefix;
  CLI::App* plotdata = app.add_subcommand(
      "plotdata", "per-level and joint mass differences with bootstrap bands");
  add_data_options(plotdata, plot_data);
  plotdata->add_option("--deciles", plot_deciles, "outcome partition bins");
  plotdata->add_option("--B", plot_B, "bootstrap replications for the bands");
  plotdata->add_option("--out", plot_prefix, "output path prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (estimate->parsed())
      return run_estimate(global, est_data, est_se, est_B);
    if (decompose->parsed()) return run_decompose(global, dec_data, dec_B);
    if (test->parsed())
      return run_test(global, test_data, test_method, test_alpha, test_B,
                      test_beta, test_deciles, test_cdf);
    if (bounds->parsed()) {
      if (bounds_from.empty() &&
          (bounds_data.csv_path.empty() || bounds_data.y.empty() ||
           bounds_data.d.empty() || bounds_data.z.empty()))
        fail(ErrorCode::InvalidArgument,
             "bounds needs either --from-json or csv with --y --d --z");
      return run_bounds(global, bounds_data, bounds_from, bounds_support,
                        bounds_shape, bounds_sign, bounds_margin, bounds_B);
    }
    if (simulate->parsed())
      return run_simulate(global, sim_grid, sim_method, sim_alpha, sim_B,
                          sim_deciles, sim_out);
    if (plotdata->parsed())
      return run_plotdata(global, plot_data, plot_deciles, plot_B, plot_prefix);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return is_degeneracy(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
