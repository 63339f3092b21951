// Copyright 2026 The GRAB Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Radar profiles, failure breakdowns, box-plot statistics and the on-disk
// report bundle (SVG radar grid, CSV tables, JSON summary).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "grab/core.hpp"
#include "grab/inference.hpp"
#include "grab/scoring.hpp"

namespace grab::reporting {

using scoring::TrialRecord;

struct RadarProfile {
  GripperType gripper = GripperType::rigid;
  std::array<double, 3> axes{};  // mean S_P, S_B, S_F
};

struct RadarPolygon {
  std::array<Eigen::Vector2d, 3> vertices;
  double area = 0.0;
};

/// Direction of radar axis i: 90 + 120 i degrees.
inline Eigen::Vector2d radar_direction(int i) {
  const double a = (90.0 + 120.0 * i) * std::numbers::pi / 180.0;
  return {std::cos(a), std::sin(a)};
}

/// Vertices at the raw axis values; area by the shoelace formula.
inline RadarPolygon radar_polygon(const RadarProfile& p) {
  for (double v : p.axes) require(in_unit_interval(v), ErrorKind::domain, "radar axis value outside [0,1]");
  RadarPolygon poly;
  for (int i = 0; i < 3; ++i) poly.vertices[static_cast<std::size_t>(i)] = p.axes[static_cast<std::size_t>(i)] * radar_direction(i);
  double twice = 0.0;
  for (std::size_t i = 0, j = 2; i < 3; j = i++)
    twice += poly.vertices[j].x() * poly.vertices[i].y() - poly.vertices[i].x() * poly.vertices[j].y();
  poly.area = std::abs(twice) / 2.0;
  return poly;
}

inline constexpr double kTieTolerance = 1e-12;

struct BestGripper {
  std::optional<GripperType> winner;  // empty on a tie
  std::vector<GripperType> tied;      // grippers sharing the maximum area, enum order
  double area = 0.0;
};

inline BestGripper best_gripper(std::span<const RadarProfile> profiles) {
  require(!profiles.empty(), ErrorKind::domain, "no radar profiles to compare");
  double best = -1.0;
  for (const auto& p : profiles) best = std::max(best, radar_polygon(p).area);
  BestGripper out;
  out.area = best;
  for (const auto& p : profiles)
    if (radar_polygon(p).area >= best - kTieTolerance) out.tied.push_back(p.gripper);
  std::sort(out.tied.begin(), out.tied.end());
  out.tied.erase(std::unique(out.tied.begin(), out.tied.end()), out.tied.end());
  // Two identical profiles for the same gripper are still a tie between entries.
  std::size_t at_max = 0;
  for (const auto& p : profiles)
    if (radar_polygon(p).area >= best - kTieTolerance) ++at_max;
  if (at_max == 1) out.winner = out.tied.front();
  return out;
}

// ---------------------------------------------------------------------------
// Failure taxonomy
// ---------------------------------------------------------------------------

enum class MajorCategory { physical, perception, execution };

inline std::string_view to_string(MajorCategory m) {
  switch (m) {
    case MajorCategory::physical: return "physical";
    case MajorCategory::perception: return "perception";
    case MajorCategory::execution: return "execution";
  }
  return "?";
}

inline MajorCategory major_of(FailureMode f) {
  switch (f) {
    case FailureMode::WGP: return MajorCategory::perception;
    case FailureMode::EXEC: return MajorCategory::execution;
    default: return MajorCategory::physical;
  }
}

struct GripperFailures {
  GripperType gripper = GripperType::rigid;
  std::map<FailureMode, std::size_t> counts;  // every mode except none, zero-filled
  std::size_t total = 0;
  std::array<double, 3> major_share{};  // physical, perception, execution

  double mode_share(FailureMode f) const {
    return total == 0 ? 0.0 : static_cast<double>(counts.at(f)) / static_cast<double>(total);
  }
};

struct FailureBreakdown {
  std::vector<GripperFailures> grippers;  // only grippers with at least one failure
};

inline FailureBreakdown failure_breakdown(std::span<const TrialRecord> records) {
  FailureBreakdown out;
  for (GripperType g : kGrippers) {
    GripperFailures gf;
    gf.gripper = g;
    for (FailureMode f : kFailureModes) gf.counts[f] = 0;
    for (const auto& r : records) {
      if (r.gripper != g || r.failure == FailureMode::none) continue;
      ++gf.counts[r.failure];
      ++gf.total;
    }
    if (gf.total == 0) continue;
    std::array<std::size_t, 3> major{};
    for (const auto& [f, n] : gf.counts) major[static_cast<std::size_t>(major_of(f))] += n;
    for (std::size_t k = 0; k < 3; ++k)
      gf.major_share[k] = static_cast<double>(major[k]) / static_cast<double>(gf.total);
    out.grippers.push_back(std::move(gf));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Box-plot statistics
// ---------------------------------------------------------------------------

struct BoxStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  std::vector<double> outliers;
  std::size_t n = 0;
};

/// Linear-interpolation quantile of sorted data (type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline BoxStats box_stats(std::span<const double> values) {
  require(!values.empty(), ErrorKind::domain, "box statistics need at least one value");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  BoxStats b;
  b.n = v.size();
  b.min = v.front();
  b.max = v.back();
  b.q1 = quantile_sorted(v, 0.25);
  b.median = quantile_sorted(v, 0.5);
  b.q3 = quantile_sorted(v, 0.75);
  const double iqr = b.q3 - b.q1;
  for (double x : v)
    if (x < b.q1 - 1.5 * iqr || x > b.q3 + 1.5 * iqr) b.outliers.push_back(x);
  return b;
}

struct BoxGroup {
  std::string mode;  // failure mode, or "none" for successful trials
  GripperType gripper = GripperType::rigid;
  inference::Predictor parameter = inference::Predictor::q_o;
  BoxStats stats;
};

inline std::vector<BoxGroup> graspability_boxes(std::span<const TrialRecord> records) {
  constexpr std::array params{inference::Predictor::q_o, inference::Predictor::q_p, inference::Predictor::q_c};
  std::vector<BoxGroup> out;
  std::vector<FailureMode> modes(kFailureModes.begin(), kFailureModes.end());
  modes.push_back(FailureMode::none);
  for (FailureMode f : modes)
    for (GripperType g : kGrippers)
      for (auto p : params) {
        std::vector<double> v;
        for (const auto& r : records)
          if (r.failure == f && r.gripper == g) v.push_back(inference::predictor_value(inference::predictors_of(r), p));
        if (v.empty()) continue;
        out.push_back({std::string(to_string(f)), g, p, box_stats(v)});
      }
  return out;
}

enum class Influence { none, weak, moderate, strong };

inline std::string_view to_string(Influence i) {
  switch (i) {
    case Influence::none: return "none";
    case Influence::weak: return "weak";
    case Influence::moderate: return "moderate";
    case Influence::strong: return "strong";
  }
  return "?";
}

struct InfluenceThresholds {
  double weak = 0.05;
  double moderate = 0.10;
  double strong = 0.20;
};

struct InfluenceRow {
  FailureMode mode = FailureMode::CL;
  inference::Predictor parameter = inference::Predictor::q_o;
  double median_shift = 0.0;  // median under the failure minus median under success, pooled over grippers
  Influence level = Influence::none;
};

/// Heuristic influence annex: thresholds the shift of the parameter median in
/// trials that hit a failure mode against successful trials.
inline std::vector<InfluenceRow> influence_summary(std::span<const TrialRecord> records,
                                                   const InfluenceThresholds& th = {}) {
  constexpr std::array params{inference::Predictor::q_o, inference::Predictor::q_p, inference::Predictor::q_c};
  std::vector<InfluenceRow> out;
  for (FailureMode f : kFailureModes)
    for (auto p : params) {
      std::vector<double> fail, ok;
      for (const auto& r : records) {
        const double v = inference::predictor_value(inference::predictors_of(r), p);
        if (r.failure == f) fail.push_back(v);
        if (r.failure == FailureMode::none) ok.push_back(v);
      }
      if (fail.empty() || ok.empty()) continue;
      InfluenceRow row{f, p, box_stats(fail).median - box_stats(ok).median, Influence::none};
      const double m = std::abs(row.median_shift);
      row.level = m >= th.strong     ? Influence::strong
                  : m >= th.moderate ? Influence::moderate
                  : m >= th.weak     ? Influence::weak
                                     : Influence::none;
      out.push_back(row);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

inline std::string sig6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

inline double round3(double v) {
  if (!std::isfinite(v)) return v;
  const double r = std::round(v * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

inline nlohmann::json json3(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round3(v);
}

// ---------------------------------------------------------------------------
// SVG radar chart
// ---------------------------------------------------------------------------

struct RadarStyle {
  double size = 320.0;
  double radius = 120.0;
  double floor = 0.0;  // display-only axis floor r0 in [0,1)
};

inline std::string_view gripper_color(GripperType g) {
  switch (g) {
    case GripperType::rigid: return "#1f77b4";
    case GripperType::finray: return "#2ca02c";
    case GripperType::suction: return "#d62728";
  }
  return "#000000";
}

inline std::string fmt_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

/// Radar chart for one (level, category) cell. Screen y grows downwards, so
/// radar y is negated. Areas shown in the legend use the raw axis values.
inline std::string radar_svg(const std::string& title, std::span<const RadarProfile> profiles,
                             const RadarStyle& style = {}) {
  const double c = style.size / 2.0;
  auto screen = [&](const Eigen::Vector2d& v) { return Eigen::Vector2d(c + v.x(), c - v.y()); };
  auto display_radius = [&](double value) { return style.radius * (style.floor + (1.0 - style.floor) * value); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_coord(style.size) << "\" height=\""
     << fmt_coord(style.size) << "\" viewBox=\"0 0 " << fmt_coord(style.size) << " " << fmt_coord(style.size)
     << "\">\n";
  os << "  <title>" << title << "</title>\n";
  static constexpr std::array<const char*, 3> kAxisNames{"S_P", "S_B", "S_F"};
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d end = screen(style.radius * radar_direction(i));
    const Eigen::Vector2d label = screen((style.radius + 14.0) * radar_direction(i));
    os << "  <line class=\"axis\" x1=\"" << fmt_coord(c) << "\" y1=\"" << fmt_coord(c) << "\" x2=\""
       << fmt_coord(end.x()) << "\" y2=\"" << fmt_coord(end.y()) << "\" stroke=\"#999999\"/>\n";
    os << "  <text x=\"" << fmt_coord(label.x()) << "\" y=\"" << fmt_coord(label.y())
       << "\" text-anchor=\"middle\" font-size=\"11\">" << kAxisNames[static_cast<std::size_t>(i)] << "</text>\n";
  }
  double legend_y = 16.0;
  for (const auto& p : profiles) {
    const RadarPolygon poly = radar_polygon(p);
    os << "  <polygon class=\"profile\" data-gripper=\"" << to_string(p.gripper) << "\" points=\"";
    for (int i = 0; i < 3; ++i) {
      const double value = p.axes[static_cast<std::size_t>(i)];
      const Eigen::Vector2d s = screen(display_radius(value) * radar_direction(i));
      os << (i ? " " : "") << fmt_coord(s.x()) << "," << fmt_coord(s.y());
    }
    os << "\" fill=\"" << gripper_color(p.gripper) << "\" fill-opacity=\"0.25\" stroke=\""
       << gripper_color(p.gripper) << "\"/>\n";
    os << "  <text x=\"8\" y=\"" << fmt_coord(legend_y) << "\" font-size=\"11\" fill=\"" << gripper_color(p.gripper)
       << "\">" << to_string(p.gripper) << " area=" << sig6(poly.area) << "</text>\n";
    legend_y += 14.0;
  }
  os << "</svg>\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Report bundle
// ---------------------------------------------------------------------------

struct ModelReport {
  inference::Outcome outcome = inference::Outcome::sp;
  std::optional<inference::FitResult> fit;
  std::string error;  // set when the fit could not be computed
  std::vector<inference::PdpCurve> pdp;
};

struct ReportBundle {
  std::vector<scoring::CategoryProfile> aggregates;
  std::vector<ModelReport> models;
  FailureBreakdown failures;
  std::vector<BoxGroup> boxes;
  std::vector<InfluenceRow> influence;
  std::optional<Mat3> correlations;
  std::size_t n_records = 0;
};

struct AnalysisOptions {
  inference::HalfAs half_as = inference::HalfAs::fail;
  int pdp_points = 21;
  InfluenceThresholds influence;
};

inline ReportBundle analyze(std::span<const TrialRecord> records, const AnalysisOptions& opt = {}) {
  ReportBundle b;
  b.n_records = records.size();
  b.aggregates = scoring::aggregate_profiles(records);
  b.failures = failure_breakdown(records);
  b.boxes = graspability_boxes(records);
  b.influence = influence_summary(records, opt.influence);
  try {
    b.correlations = inference::pearson_correlations(records);
  } catch (const Error&) {
    b.correlations.reset();
  }

  const std::vector<double> grid = inference::linear_grid(0.0, 1.0, opt.pdp_points);
  for (auto outcome : {inference::Outcome::sp, inference::Outcome::sb, inference::Outcome::sf}) {
    ModelReport m;
    m.outcome = outcome;
    try {
      const inference::ModelSpec spec{outcome, opt.half_as};
      const std::vector<inference::ModelRow> rows = inference::model_rows(records, spec);
      const inference::DesignMatrix d = inference::build_design(std::span<const inference::ModelRow>(rows));
      m.fit = outcome == inference::Outcome::sp ? inference::fit_logistic(d) : inference::fit_fractional_logit(d);
      for (auto p : {inference::Predictor::q_o, inference::Predictor::q_p, inference::Predictor::q_c})
        for (GripperType g : kGrippers) m.pdp.push_back(inference::partial_dependence(*m.fit, rows, p, g, grid));
    } catch (const Error& e) {
      m.fit.reset();
      m.error = e.what();
    }
    b.models.push_back(std::move(m));
  }
  return b;
}

inline std::string aggregates_csv(std::span<const scoring::CategoryProfile> rows) {
  std::string out = "level,category,gripper,mean_sp,mean_sb,mean_sf,n_trials\n";
  for (const auto& r : rows) {
    out += std::to_string(r.level) + "," + std::string(to_string(r.category)) + "," +
           std::string(to_string(r.gripper)) + "," + sig6(r.mean_sp) + "," + sig6(r.mean_sb) + "," +
           sig6(r.mean_sf) + "," + std::to_string(r.n_trials) + "\n";
  }
  return out;
}

inline std::string fit_csv(const inference::FitResult& fit) {
  std::string out = "term,coef,se,z,p,odds_ratio,ci_low,ci_high,separation,se_information,se_robust\n";
  for (Eigen::Index j = 0; j < fit.estimate.size(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    out += fit.columns[jj] + "," + sig6(fit.estimate(j)) + "," + sig6(fit.se(j)) + "," + sig6(fit.z(j)) + "," +
           sig6(fit.p_value(j)) + "," + sig6(fit.odds_ratio(j)) + "," + sig6(fit.ci_low(j)) + "," +
           sig6(fit.ci_high(j)) + "," + (fit.separation[jj] ? "1" : "0") + "," + sig6(fit.information_se(j)) + "," +
           sig6(fit.robust_se(j)) + "\n";
  }
  return out;
}

inline std::string pdp_csv(std::span<const inference::PdpCurve> curves) {
  std::string out = "predictor,gripper,grid,value\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out += std::string(inference::to_string(c.predictor)) + "," + std::string(to_string(c.gripper)) + "," +
             sig6(c.grid[i]) + "," + sig6(c.value[i]) + "\n";
  return out;
}

inline std::string failures_csv(const FailureBreakdown& fb) {
  std::string out = "gripper,major_category,mode,count,share\n";
  for (const auto& g : fb.grippers)
    for (FailureMode f : kFailureModes)
      out += std::string(to_string(g.gripper)) + "," + std::string(to_string(major_of(f))) + "," +
             std::string(to_string(f)) + "," + std::to_string(g.counts.at(f)) + "," + sig6(g.mode_share(f)) + "\n";
  return out;
}

inline std::string boxes_csv(std::span<const BoxGroup> boxes) {
  std::string out = "mode,gripper,parameter,n,min,q1,median,q3,max,n_outliers\n";
  for (const auto& b : boxes)
    out += b.mode + "," + std::string(to_string(b.gripper)) + "," + std::string(inference::to_string(b.parameter)) +
           "," + std::to_string(b.stats.n) + "," + sig6(b.stats.min) + "," + sig6(b.stats.q1) + "," +
           sig6(b.stats.median) + "," + sig6(b.stats.q3) + "," + sig6(b.stats.max) + "," +
           std::to_string(b.stats.outliers.size()) + "\n";
  return out;
}

inline std::string influence_csv(std::span<const InfluenceRow> rows) {
  std::string out = "# heuristic: median shift of each parameter between failing and successful trials\n";
  out += "mode,parameter,median_shift,influence\n";
  for (const auto& r : rows)
    out += std::string(to_string(r.mode)) + "," + std::string(inference::to_string(r.parameter)) + "," +
           sig6(r.median_shift) + "," + std::string(to_string(r.level)) + "\n";
  return out;
}

inline std::map<std::pair<int, ObjectCategory>, std::vector<RadarProfile>> radar_cells(
    std::span<const scoring::CategoryProfile> aggregates) {
  std::map<std::pair<int, ObjectCategory>, std::vector<RadarProfile>> cells;
  for (const auto& a : aggregates)
    cells[{a.level, a.category}].push_back({a.gripper, {a.mean_sp, a.mean_sb, a.mean_sf}});
  return cells;
}

inline nlohmann::json summary_json(const ReportBundle& b) {
  using nlohmann::json;
  json j;
  j["n_records"] = b.n_records;

  json cells = json::array();
  for (const auto& [key, profiles] : radar_cells(b.aggregates)) {
    const BestGripper best = best_gripper(profiles);
    json cell;
    cell["level"] = key.first;
    cell["category"] = std::string(to_string(key.second));
    json areas = json::object();
    for (const auto& p : profiles) areas[std::string(to_string(p.gripper))] = json3(radar_polygon(p).area);
    cell["areas"] = areas;
    if (best.winner) {
      cell["best"] = std::string(to_string(*best.winner));
    } else {
      json tied = json::array();
      for (GripperType g : best.tied) tied.push_back(std::string(to_string(g)));
      cell["best"] = "tie";
      cell["tied"] = tied;
    }
    cells.push_back(cell);
  }
  j["radar"] = cells;

  json models = json::object();
  for (const auto& m : b.models) {
    json mj;
    if (!m.fit) {
      mj["error"] = m.error;
    } else {
      const auto& f = *m.fit;
      mj["family"] = f.family == inference::Family::logistic ? "logistic" : "fractional_logit";
      mj["converged"] = f.converged;
      mj["n_obs"] = f.n_obs;
      mj["log_likelihood"] = json3(f.log_likelihood);
      json terms = json::array();
      for (Eigen::Index k = 0; k < f.estimate.size(); ++k) {
        const auto kk = static_cast<std::size_t>(k);
        terms.push_back({{"term", f.columns[kk]},
                         {"coef", json3(f.estimate(k))},
                         {"odds_ratio", json3(f.odds_ratio(k))},
                         {"p", json3(f.p_value(k))},
                         {"ci", {json3(f.ci_low(k)), json3(f.ci_high(k))}},
                         {"separation", static_cast<bool>(f.separation[kk])}});
      }
      mj["terms"] = terms;
    }
    models[std::string(inference::to_string(m.outcome))] = mj;
  }
  j["models"] = models;

  json fails = json::object();
  for (const auto& g : b.failures.grippers) {
    fails[std::string(to_string(g.gripper))] = {{"total", g.total},
                                                {"physical", json3(g.major_share[0])},
                                                {"perception", json3(g.major_share[1])},
                                                {"execution", json3(g.major_share[2])}};
  }
  j["failures"] = fails;

  if (b.correlations) {
    json corr = json::array();
    for (int r = 0; r < 3; ++r) corr.push_back({json3((*b.correlations)(r, 0)), json3((*b.correlations)(r, 1)),
                                                json3((*b.correlations)(r, 2))});
    j["correlations"] = {{"order", {"Q_O", "Q_P", "Q_C"}}, {"r", corr}};
  }
  return j;
}

namespace detail {
inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::io, "cannot write " + path.string());
  os << content;
  os.flush();
  require(static_cast<bool>(os), ErrorKind::io, "failed writing " + path.string());
}
}  // namespace detail

/// Writes the bundle under `destination`:
///   radar/<level>_<category>.svg, tables/aggregates.csv, tables/fit_<outcome>.csv,
///   tables/pdp_<outcome>.csv, tables/box_stats.csv, tables/influence.csv,
///   failures.csv, summary.json
inline void emit_report(const ReportBundle& b, const std::filesystem::path& destination,
                        const RadarStyle& style = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(destination / "radar", ec);
  require(!ec, ErrorKind::io, "cannot create " + (destination / "radar").string() + ": " + ec.message());
  fs::create_directories(destination / "tables", ec);
  require(!ec, ErrorKind::io, "cannot create " + (destination / "tables").string() + ": " + ec.message());

  for (const auto& [key, profiles] : radar_cells(b.aggregates)) {
    const std::string name = std::to_string(key.first) + "_" + std::string(to_string(key.second));
    detail::write_file(destination / "radar" / (name + ".svg"), radar_svg("level " + name, profiles, style));
  }
  detail::write_file(destination / "tables" / "aggregates.csv", aggregates_csv(b.aggregates));
  for (const auto& m : b.models) {
    const std::string o(inference::to_string(m.outcome));
    detail::write_file(destination / "tables" / ("fit_" + o + ".csv"),
                       m.fit ? fit_csv(*m.fit) : "term,coef,se,z,p,odds_ratio,ci_low,ci_high,separation,se_information,se_robust\n");
    detail::write_file(destination / "tables" / ("pdp_" + o + ".csv"), pdp_csv(m.pdp));
  }
  detail::write_file(destination / "tables" / "box_stats.csv", boxes_csv(b.boxes));
  detail::write_file(destination / "tables" / "influence.csv", influence_csv(b.influence));
  detail::write_file(destination / "failures.csv", failures_csv(b.failures));
  detail::write_file(destination / "summary.json", summary_json(b).dump(2) + "\n");
}

}  // namespace grab::reporting
