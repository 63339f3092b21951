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

// grab: command-line front end for the evaluation toolkit.
// Exit codes: 0 ok, 1 data error, 2 usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "grab/deformation.hpp"
#include "grab/geometry.hpp"
#include "grab/inference.hpp"
#include "grab/io.hpp"
#include "grab/reporting.hpp"
#include "grab/scene.hpp"
#include "grab/scoring.hpp"
#include "grab/simulate.hpp"

namespace {

using namespace grab;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) { return reporting::sig6(v); }

int cmd_dcd(const std::string& pre, const std::string& defx, const std::string& defy, double alpha) {
  deformation::ObjectScoreInput in{io::read_point_cloud(pre), io::read_point_cloud(defx), io::read_point_cloud(defy)};
  const auto s = deformation::object_score(in, deformation::DcdParams{alpha});
  std::cout << "dcd_x," << num(s.dcd_x) << "\n"
            << "dcd_y," << num(s.dcd_y) << "\n"
            << "q_o," << num(s.q_o) << "\n";
  return 0;
}

int cmd_occupancy(const std::string& depth, const std::string& mask, int min_mm, int max_mm, int trim) {
  if (min_mm < 0 || max_mm > 65535 || min_mm >= max_mm) throw UsageError("need 0 <= --min-mm < --max-mm <= 65535");
  scene::OccupancyOptions opt;
  opt.min_mm = static_cast<std::uint16_t>(min_mm);
  opt.max_mm = static_cast<std::uint16_t>(max_mm);
  opt.workspace.h_trim = opt.workspace.v_trim = trim;
  const auto r = scene::scene_occupancy(io::read_depth_pgm(depth), io::read_mask_pgm(mask), opt);
  std::cout << "workspace_pixels," << r.workspace_pixels << "\n"
            << "object_pixels," << r.object_pixels << "\n"
            << "occupancy," << num(r.ratio) << "\n";
  return 0;
}

int cmd_score(const std::string& path, bool aggregate) {
  const io::TrialLog log = io::read_trial_log(path);
  if (aggregate) {
    std::cout << reporting::aggregates_csv(scoring::aggregate_profiles(log.records));
    return 0;
  }
  const auto scores = scoring::score_trials(log.records);
  std::cout << "level,scene_id,trial_index,gripper,category,sp,sb,sf\n";
  for (std::size_t i : scoring::fold_order(log.records)) {
    const auto& r = log.records[i];
    std::cout << r.experiment_level << "," << r.scene_id << "," << r.trial_index << "," << to_string(r.gripper)
              << "," << to_string(r.category) << "," << num(scores[i].sp) << "," << num(scores[i].sb) << ","
              << num(scores[i].sf) << "\n";
  }
  return 0;
}

int cmd_fit(const std::string& path, const std::string& outcome, const std::string& half_as, bool as_json) {
  const auto o = inference::parse_outcome(outcome);
  if (!o) throw UsageError("--outcome must be sp, sb or sf");
  const auto h = inference::parse_half_as(half_as);
  if (!h) throw UsageError("--half-as must be fail, success or drop-row");
  const io::TrialLog log = io::read_trial_log(path);
  const auto design = inference::build_design(log.records, {*o, *h});
  const auto fit = *o == inference::Outcome::sp ? inference::fit_logistic(design)
                                                 : inference::fit_fractional_logit(design);
  if (as_json) {
    nlohmann::json j;
    j["family"] = fit.family == inference::Family::logistic ? "logistic" : "fractional_logit";
    j["n_obs"] = fit.n_obs;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["log_likelihood"] = reporting::json3(fit.log_likelihood);
    nlohmann::json terms = nlohmann::json::array();
    const auto rows = inference::odds_ratio_table(fit);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& row = rows[k];
      const auto kk = static_cast<Eigen::Index>(k);
      // se is the one behind p and ci; both variants are listed
      terms.push_back({{"term", row.term},
                       {"coef", reporting::json3(row.coef)},
                       {"se", reporting::json3(fit.se(kk))},
                       {"se_information", reporting::json3(fit.information_se(kk))},
                       {"se_robust", reporting::json3(fit.robust_se(kk))},
                       {"odds_ratio", reporting::json3(row.odds_ratio)},
                       {"p", reporting::json3(row.p_value)},
                       {"ci", {reporting::json3(row.ci_low), reporting::json3(row.ci_high)}},
                       {"separation", static_cast<bool>(fit.separation[k])}});
    }
    j["terms"] = terms;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << inference::format_odds_ratio_table(inference::odds_ratio_table(fit));
  }
  for (std::size_t k = 0; k < fit.separation.size(); ++k)
    if (fit.separation[k])
      std::cerr << "warning: " << fit.columns[k] << " shows signs of quasi-complete separation\n";
  if (!fit.converged) std::cerr << "warning: IRLS did not converge\n";
  return 0;
}

int cmd_report(const std::string& path, const std::string& out, const std::string& half_as) {
  const auto h = inference::parse_half_as(half_as);
  if (!h) throw UsageError("--half-as must be fail, success or drop-row");
  const io::TrialLog log = io::read_trial_log(path);
  reporting::AnalysisOptions opt;
  opt.half_as = *h;
  const auto bundle = reporting::analyze(log.records, opt);
  reporting::emit_report(bundle, out);
  for (const auto& m : bundle.models)
    if (!m.fit) std::cerr << "warning: " << inference::to_string(m.outcome) << " model skipped: " << m.error << "\n";
  return 0;
}

int cmd_simulate(std::optional<int> level, const std::string& gripper, std::uint64_t seed, const std::string& out) {
  const harness::GeneratorTruth truth;
  io::TrialLog log;
  log.seed = seed;
  std::optional<GripperType> g;
  if (gripper != "all") {
    g = parse_gripper(gripper);
    if (!g) throw UsageError("--gripper must be rigid, finray, suction or all");
  }
  if (level && (*level < 1 || *level > 4)) throw UsageError("--level must be 1-4");
  for (int l = 1; l <= 4; ++l) {
    if (level && l != *level) continue;
    for (GripperType gg : kGrippers) {
      if (g && gg != *g) continue;
      auto part = harness::simulate({l, gg}, truth, seed);
      log.records.insert(log.records.end(), part.records.begin(), part.records.end());
    }
  }
  if (out == "-")
    std::cout << io::format_trial_log(log);
  else
    io::write_trial_log(log, out);
  return 0;
}

int cmd_validate(const std::string& path) {
  const io::TrialLog log = io::read_trial_log(path);
  const auto v = harness::validate(log.records);
  for (const auto& x : v) {
    std::cout << (x.scene_id.empty() ? "-" : x.scene_id);
    if (x.trial_index >= 0) std::cout << "#" << x.trial_index;
    std::cout << ": " << x.message << "\n";
  }
  std::cout << log.records.size() << " records, " << v.size() << " violations\n";
  return v.empty() ? 0 : kExitData;
}

int cmd_poses(const std::string& path, double clearance, double min_angle, std::vector<double> normal,
              double offset) {
  if (normal.size() != 3) throw UsageError("--normal takes three values");
  geometry::WorkbenchPlane plane{Vec3(normal[0], normal[1], normal[2]), offset};
  if (plane.normal.norm() == 0.0) throw UsageError("--normal must be non-zero");
  const auto poses = io::read_pose_list(path);
  const auto kept = geometry::filter_poses(poses, plane, clearance, min_angle);
  std::cout << "candidates," << poses.size() << "\n"
            << "kept," << kept.size() << "\n"
            << "q_p," << num(scoring::grasp_score(kept)) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grab: grasp benchmark evaluation toolkit"};
  app.require_subcommand(1);

  std::string a, b, c, out = "report";
  double alpha = 40.0;
  auto* dcd = app.add_subcommand("dcd", "object score Q_O from pre-grasp and two deformed clouds");
  dcd->add_option("pre", a, "pre-grasp cloud (PLY ascii or XYZ)")->required();
  dcd->add_option("defx", b, "cloud deformed along x")->required();
  dcd->add_option("defy", c, "cloud deformed along y")->required();
  dcd->add_option("--alpha", alpha, "DCD temperature")->check(CLI::PositiveNumber);

  int min_mm = scene::kDefaultMinDepthMm, max_mm = scene::kDefaultMaxDepthMm, trim = scene::kDefaultTrim;
  auto* occ = app.add_subcommand("occupancy", "workspace occupancy from a depth PGM and workspace mask");
  occ->add_option("depth", a, "16-bit depth PGM (mm)")->required();
  occ->add_option("mask", b, "8-bit workspace mask PGM")->required();
  occ->add_option("--min-mm", min_mm, "inclusive lower depth bound");
  occ->add_option("--max-mm", max_mm, "inclusive upper depth bound");
  occ->add_option("--trim", trim, "margin trimmed from each side of the workspace")->check(CLI::NonNegativeNumber);

  bool aggregate = false;
  auto* score = app.add_subcommand("score", "per-trial S_P, S_B, S_F");
  score->add_option("log", a, "trial log (JSONL)")->required();
  score->add_flag("--aggregate", aggregate, "per level/category/gripper means instead");

  std::string outcome, half_as = "fail";
  bool as_json = false;
  auto* fit = app.add_subcommand("fit", "logit fit of one outcome on the graspability design");
  fit->add_option("log", a, "trial log (JSONL)")->required();
  fit->add_option("--outcome", outcome, "sp, sb or sf")->required();
  fit->add_option("--half-as", half_as, "S_P = 0.5 handling: fail, success or drop-row");
  fit->add_flag("--json", as_json, "JSON output");

  auto* report = app.add_subcommand("report", "write the report bundle");
  report->add_option("log", a, "trial log (JSONL)")->required();
  report->add_option("-o,--output", out, "destination directory");
  report->add_option("--half-as", half_as, "S_P = 0.5 handling for the success model");

  std::optional<int> level;
  std::string gripper = "all";
  std::uint64_t seed = 0;
  auto* sim = app.add_subcommand("simulate", "synthetic trial log for the four-level protocol");
  sim->add_option("--level", level, "1-4 (default: all)");
  sim->add_option("--gripper", gripper, "rigid, finray, suction or all");
  sim->add_option("--seed", seed, "root seed")->required();
  sim->add_option("-o,--output", b, "output JSONL, - for stdout")->required();

  auto* val = app.add_subcommand("validate", "check a log against the protocol");
  val->add_option("log", a, "trial log (JSONL)")->required();

  double clearance = geometry::kDefaultGripperClearance, min_angle = geometry::kDefaultMinApproachDeg, offset = 0.0;
  std::vector<double> normal{0.0, 0.0, 1.0};
  auto* poses = app.add_subcommand("poses", "filter an executable pose list and report Q_P");
  poses->add_option("poses", a, "pose list JSON")->required();
  poses->add_option("--clearance", clearance, "minimum height above the bench (m)");
  poses->add_option("--min-angle", min_angle, "minimum approach angle to the bench (deg)");
  poses->add_option("--normal", normal, "bench normal")->expected(3);
  poses->add_option("--offset", offset, "bench offset along the normal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*dcd) return cmd_dcd(a, b, c, alpha);
    if (*occ) return cmd_occupancy(a, b, min_mm, max_mm, trim);
    if (*score) return cmd_score(a, aggregate);
    if (*fit) return cmd_fit(a, outcome, half_as, as_json);
    if (*report) return cmd_report(a, out, half_as);
    if (*sim) return cmd_simulate(level, gripper, seed, b);
    if (*val) return cmd_validate(a);
    if (*poses) return cmd_poses(a, clearance, min_angle, normal, offset);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const grab::Error& e) {
    std::cerr << "error (" << grab::to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
