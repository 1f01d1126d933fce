#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "emco/error.hpp"

namespace emco::cli {

namespace {

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json optional_number(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

}  // namespace

json RunReport::to_json() const {
  return json{{"schema_version", 1},
              {"command", command},
              {"seed", seed},
              {"threads", threads},
              {"timing_ms", timing_ms},
              {"config", config},
              {"warnings", warnings},
              {"results", results}};
}

std::string write_report(const std::string& out_dir, const RunReport& report) {
  const std::string path = out_dir + "/emco_" + report.command + "_report.json";
  std::ofstream f(path);
  if (!f) fail(ErrorCode::InvalidArgument, "cannot write report: " + path);
  f << report.to_json().dump(2) << '\n';
  return path;
}

json to_json(const WaldEstimate& est) {
  return json{{"value", number_or_null(est.value)},
              {"reduced_form", number_or_null(est.reduced_form)},
              {"first_stage", number_or_null(est.first_stage)},
              {"se", optional_number(est.se)},
              {"n", est.n}};
}

json to_json(const ComplierDecomposition& dec,
             const std::vector<double>& level_labels) {
  json levels = json::array();
  for (const LevelMean& lm : dec.levels) {
    levels.push_back(json{
        {"level", lm.level},
        {"label", level_labels[lm.level]},
        {"share", number_or_null(lm.share)},
        {"share_se", optional_number(lm.share_se)},
        {"delta_pr", number_or_null(lm.delta_pr)},
        {"defined", lm.defined},
        {"treated_mean", lm.defined ? number_or_null(lm.value) : json(nullptr)},
        {"se", optional_number(lm.se)}});
  }
  return json{{"beta_recoded", number_or_null(dec.beta_recoded)},
              {"beta_recoded_se", optional_number(dec.beta_recoded_se)},
              {"untreated_mean_pooled", number_or_null(dec.untreated_mean_pooled)},
              {"untreated_se", optional_number(dec.untreated_se)},
              {"total_complier_share", number_or_null(dec.total_complier_share)},
              {"total_share_se", optional_number(dec.total_share_se)},
              {"levels", levels},
              {"n", dec.n}};
}

json to_json(const TestResult& res) {
  json moments = json::array();
  for (const MomentDiagnostic& d : res.per_moment) {
    moments.push_back(json{{"label", d.label},
                           {"mean", number_or_null(d.mean)},
                           {"sd", number_or_null(d.sd)},
                           {"t", number_or_null(d.t)},
                           {"recentered", number_or_null(d.recentered)},
                           {"selected", d.selected},
                           {"excluded", d.excluded}});
  }
  return json{{"method", to_string(res.method)},
              {"statistic", number_or_null(res.statistic)},
              {"critical_value", number_or_null(res.critical_value)},
              {"reject", res.reject},
              {"alpha", res.alpha},
              {"beta_n", res.beta_n},
              {"B", res.B},
              {"seed", res.seed},
              {"n", res.n},
              {"p", res.p},
              {"per_moment", moments}};
}

json to_json(const BoundsResult& res) {
  json effects = json::array();
  for (const EffectBound& eb : res.effects) {
    effects.push_back(json{{"level", eb.level},
                           {"skipped_zero_share", eb.skipped_zero_share},
                           {"lo", number_or_null(eb.lo)},
                           {"hi", number_or_null(eb.hi)},
                           {"informative", eb.informative}});
  }
  return json{{"effects", effects}};
}

json to_json(const FeasibilityResult& res) {
  json witness = json::array();
  for (double v : res.witness) witness.push_back(number_or_null(v));
  return json{{"feasible", res.feasible},
              {"witness", witness},
              {"certificate", res.certificate}};
}

json to_json(const PowerCell& cell) {
  return json{{"cell", cell.index},
              {"method", to_string(cell.method)},
              {"delta_ext1", cell.cfg.delta_ext1},
              {"delta_ext2", cell.cfg.delta_ext2},
              {"delta_int", cell.cfg.delta_int},
              {"delta_y", cell.cfg.delta_y},
              {"a", cell.cfg.a},
              {"b", cell.cfg.b},
              {"n_obs", cell.cfg.n_obs},
              {"n_sims", cell.cfg.n_sims},
              {"reject_rate", cell.reject_rate},
              {"binom_se", cell.binom_se},
              {"n_done", cell.n_done},
              {"n_errors", cell.n_errors}};
}

BoundsProblem bounds_problem_from_json(const json& decomposition,
                                       double support_lo, double support_hi,
                                       ShapeRestriction shape) {
  BoundsProblem p;
  p.untreated_mean_pooled = decomposition.at("untreated_mean_pooled").get<double>();
  p.support_lo = support_lo;
  p.support_hi = support_hi;
  p.shape = shape;
  for (const json& level : decomposition.at("levels")) {
    p.shares.push_back(level.at("share").get<double>());
    p.treated_means.push_back(level.at("defined").get<bool>()
                                  ? level.at("treated_mean").get<double>()
                                  : std::numeric_limits<double>::quiet_NaN());
  }
  p.validate();
  return p;
}

TextTable::TextTable(std::vector<std::string> header) {
  rows_.push_back(std::move(header));
}

void TextTable::add_row(std::vector<std::string> cells) {
  rows_.push_back(std::move(cells));
}

std::string TextTable::to_string() const {
  std::vector<std::size_t> width;
  for (const auto& row : rows_) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < rows_[r].size(); ++c) {
      const std::string& cell = rows_[r][c];
      if (c > 0) out += "  ";
      if (c == 0) {
        out += cell;
        out.append(width[c] - cell.size(), ' ');
      } else {
        out.append(width[c] - cell.size(), ' ');
        out += cell;
      }
    }
    out += '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c)
        total += width[c] + (c > 0 ? 2 : 0);
      out.append(total, '-');
      out += '\n';
    }
  }
  return out;
}

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "--";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

}  // namespace emco::cli
