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

// Synthetic trial generator for the four-level clutter protocol, plus the
// protocol validator. Randomness comes from per-task seeds derived from one
// root seed, so a log is a pure function of (protocol, truth, seed).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "grab/core.hpp"
#include "grab/inference.hpp"
#include "grab/io.hpp"
#include "grab/scene.hpp"
#include "grab/scoring.hpp"

namespace grab::harness {

using scoring::TrialRecord;

inline constexpr int kObjectsPerCategory = 3;
inline constexpr int kRepetitions = 5;
inline constexpr int kClusters = 3;

inline bool suction_excluded(ObjectCategory c) {
  return c == ObjectCategory::plastic_bag || c == ObjectCategory::mesh_bag;
}

struct ProtocolSpec {
  int level = 1;
  GripperType gripper = GripperType::rigid;

  bool drops_bags() const { return gripper == GripperType::suction && level >= 2; }
  int categories() const { return drops_bags() ? 5 : 7; }

  /// Objects in one scene; level 1 places a single object per scene.
  int objects_per_scene() const {
    if (level == 1) return 1;
    const int per_category = level == 2 ? 1 : 2;
    return per_category * categories();
  }

  int scenes() const { return level == 1 ? 7 * kObjectsPerCategory * kRepetitions : kClusters * kRepetitions; }
  int expected_trials() const { return scenes() * objects_per_scene(); }
};

inline void check_protocol(const ProtocolSpec& p) {
  require(p.level >= 1 && p.level <= 4, ErrorKind::domain, "protocol level must be 1-4");
}

struct GeneratorTruth {
  // Rows follow the 12-column design order of inference::design_column_names().
  std::array<std::array<double, inference::kDesignColumns>, 3> coefficients{{
      {-0.5, 1.5, 0.3, 1.2, 0.6, 1.0, 0.0, -0.1, -0.5, -0.8, -0.6, -2.0},   // S_P
      {0.8, 0.6, -0.3, -0.8, 0.3, 0.2, 0.1, -0.1, 0.4, -0.2, 0.1, -0.6},    // S_B
      {0.2, 0.4, -0.5, -0.3, -0.1, 0.5, 0.1, 0.2, 0.0, -0.2, 0.1, -0.3},    // S_F
  }};
  double zero_pose_probability = 0.05;  // no pose survives filtering
  double drop_share = 0.25;             // share of non-successes that are transit drops
  double precision = 12.0;              // Beta precision of fractional draws
  // Mean object score per category, kCategories order.
  std::array<double, 7> q_o_mean{0.72, 0.45, 0.15, 0.30, 0.35, 0.62, 0.06};
  double q_o_spread = 0.06;  // offset between the three objects of a category
  // Level-4 fluid film: logit penalty on success per gripper, slip weight multiplier.
  std::array<double, 3> fluid_penalty{0.6, 0.2, 0.8};
  double fluid_slip_multiplier = 2.5;
  double fluid_op_boost = 1.5;

  std::span<const double> of(inference::Outcome o) const { return coefficients[static_cast<std::size_t>(o)]; }
};

namespace detail {

// splitmix64 finaliser, used only to spread task identifiers into seeds
inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double eta(std::span<const double> beta, double q_o, double q_p, double q_c, GripperType g) {
  const Eigen::RowVectorXd row = inference::design_row(q_o, q_p, q_c, g);
  double s = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) s += row(j) * beta[static_cast<std::size_t>(j)];
  return s;
}

inline double beta_draw(std::mt19937_64& rng, double mean, double precision) {
  mean = std::clamp(mean, 1e-6, 1.0 - 1e-6);
  std::gamma_distribution<double> ga(mean * precision, 1.0), gb((1.0 - mean) * precision, 1.0);
  const double a = ga(rng), b = gb(rng);
  return a + b > 0.0 ? a / (a + b) : mean;
}

struct SimObject {
  ObjectCategory category;
  int index;  // 0..2 within the category
  std::string id;
  double q_o;
  double footprint;  // share of the workspace covered
};

inline double category_footprint(ObjectCategory c) {
  switch (c) {
    case ObjectCategory::plastic_bag: return 0.060;
    case ObjectCategory::plastic_container: return 0.050;
    case ObjectCategory::plastic_plate: return 0.055;
    case ObjectCategory::plastic_bottle: return 0.040;
    case ObjectCategory::lpb: return 0.040;
    case ObjectCategory::mesh_bag: return 0.045;
    case ObjectCategory::tin_can: return 0.030;
  }
  return 0.04;
}

inline SimObject make_object(const GeneratorTruth& t, ObjectCategory c, int k) {
  const double mean = t.q_o_mean[static_cast<std::size_t>(c)];
  return {c, k, std::string(to_string(c)) + "-" + std::to_string(k + 1),
          std::clamp(mean + t.q_o_spread * (k - 1), 0.0, 1.0), category_footprint(c) * (1.0 + 0.1 * (k - 1))};
}

inline double draw_q_p(std::mt19937_64& rng, const GeneratorTruth& t, double q_c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < t.zero_pose_probability) return 0.0;
  std::normal_distribution<double> n(0.68 - 0.12 * q_c, 0.16);
  return std::clamp(n(rng), 0.02, 1.0);
}

inline FailureMode draw_failure(std::mt19937_64& rng, const GeneratorTruth& t, int level, GripperType g,
                                double q_o, double q_c) {
  const bool fluid = level == 4;
  std::array<double, 6> w{};  // CL, CLS, SL, OP, WGP, EXEC
  if (g == GripperType::suction) {
    w = {0.05, 0.2 * q_c, 0.1 * (fluid ? t.fluid_slip_multiplier : 1.0), 3.0 * (fluid ? t.fluid_op_boost : 1.0),
         0.3 * q_o, 0.1};
  } else {
    w = {0.4 + 2.0 * (1.0 - q_o), 1.5 * q_c, 0.3 * (fluid ? t.fluid_slip_multiplier : 1.0), 0.0, 1.2 * q_o, 0.1};
  }
  std::discrete_distribution<int> d(w.begin(), w.end());
  return kFailureModes[static_cast<std::size_t>(d(rng))];
}

inline double gripper_base_time(GripperType g) {
  switch (g) {
    case GripperType::rigid: return 12.0;
    case GripperType::finray: return 13.0;
    case GripperType::suction: return 9.0;
  }
  return 12.0;
}

inline constexpr double kCycleSpan = 8.0;
inline constexpr double kHoldStart = 1.0;
inline constexpr double kHoldEnd = 6.0;

/// Outcome, failure mode, timeline and cycle time of one attempt.
inline void draw_trial(std::mt19937_64& rng, const GeneratorTruth& t, int level, TrialRecord& r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const bool seal_impossible = level == 1 && r.gripper == GripperType::suction && suction_excluded(r.category);

  if (seal_impossible) {
    r.outcome = TrialOutcome::fail;
    r.failure = FailureMode::OP;
  } else if (r.q_p == 0.0) {
    r.outcome = TrialOutcome::fail;  // nothing to execute
    r.failure = FailureMode::WGP;
  } else {
    double e = eta(t.of(inference::Outcome::sp), r.q_o, r.q_p, r.q_c, r.gripper);
    if (level == 4) e -= t.fluid_penalty[static_cast<std::size_t>(r.gripper)];
    if (u(rng) < inference::sigmoid(e)) {
      r.outcome = TrialOutcome::success;
      r.failure = FailureMode::none;
    } else if (u(rng) < t.drop_share) {
      r.outcome = TrialOutcome::dropped_transit;
      r.failure = r.gripper == GripperType::suction ? FailureMode::OP : FailureMode::SL;
    } else {
      r.outcome = TrialOutcome::fail;
      r.failure = draw_failure(rng, t, level, r.gripper, r.q_o, r.q_c);
    }
  }

  if (r.outcome == TrialOutcome::fail) return;

  scoring::HoldTimeline tl{kHoldStart, kHoldEnd, kHoldEnd};
  if (r.outcome == TrialOutcome::dropped_transit) {
    const double mb = inference::sigmoid(eta(t.of(inference::Outcome::sb), r.q_o, r.q_p, r.q_c, r.gripper));
    const double sb = std::min(beta_draw(rng, mb, t.precision), 0.999);
    tl.t2 = kHoldStart + sb * (kHoldEnd - kHoldStart);
  }
  r.timeline = tl;
  const double mf = inference::sigmoid(eta(t.of(inference::Outcome::sf), r.q_o, r.q_p, r.q_c, r.gripper));
  const double sf = beta_draw(rng, mf, t.precision);
  r.cycle_time_s = gripper_base_time(r.gripper) + (1.0 - sf) * kCycleSpan;
}

inline std::vector<SimObject> cluster_objects(const GeneratorTruth& t, const ProtocolSpec& p, int cluster) {
  // level 2: cluster c holds object c of every category; levels 3-4 pair clusters (c, c+1)
  std::vector<int> members{cluster};
  if (p.level >= 3) members.push_back((cluster + 1) % kClusters);
  std::vector<SimObject> out;
  for (int m : members)
    for (ObjectCategory c : kCategories) {
      if (p.drops_bags() && suction_excluded(c)) continue;
      out.push_back(make_object(t, c, m));
    }
  return out;
}

}  // namespace detail

inline std::uint64_t task_seed(std::uint64_t root, int level, GripperType g) {
  return detail::mix(detail::mix(root) ^ (static_cast<std::uint64_t>(level) << 8 | static_cast<std::uint64_t>(g)));
}

inline io::TrialLog simulate(const ProtocolSpec& p, const GeneratorTruth& truth, std::uint64_t seed) {
  check_protocol(p);
  std::mt19937_64 rng(task_seed(seed, p.level, p.gripper));
  io::TrialLog log;
  log.seed = seed;
  const std::string prefix = "L" + std::to_string(p.level) + "-" + std::string(to_string(p.gripper));

  auto base_record = [&](const detail::SimObject& o, const std::string& scene, int index) {
    TrialRecord r;
    r.experiment_level = p.level;
    r.scene_id = scene;
    r.trial_index = index;
    r.gripper = p.gripper;
    r.category = o.category;
    r.object_id = o.id;
    r.q_o = o.q_o;
    return r;
  };

  if (p.level == 1) {
    for (ObjectCategory c : kCategories)
      for (int k = 0; k < kObjectsPerCategory; ++k) {
        const detail::SimObject o = detail::make_object(truth, c, k);
        for (int pos = 0; pos < kRepetitions; ++pos) {
          TrialRecord r = base_record(o, prefix + "-" + o.id + "-p" + std::to_string(pos + 1), 0);
          r.q_c = 0.0;
          r.q_p = detail::draw_q_p(rng, truth, 0.0);
          detail::draw_trial(rng, truth, 1, r);
          log.records.push_back(std::move(r));
        }
      }
    return log;
  }

  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  for (int cluster = 0; cluster < kClusters; ++cluster) {
    const std::vector<detail::SimObject> objects = detail::cluster_objects(truth, p, cluster);
    for (int run = 0; run < kRepetitions; ++run) {
      const std::string scene = prefix + "-c" + std::to_string(cluster + 1) + "-r" + std::to_string(run + 1);
      std::vector<detail::SimObject> remaining = objects;
      // footprints vary a little with each random arrangement
      std::vector<double> footprint;
      for (const auto& o : remaining) footprint.push_back(o.footprint * jitter(rng));
      double o_initial = 0.0;
      for (double f : footprint) o_initial += f;
      double o_now = o_initial;
      const int n_initial = static_cast<int>(objects.size());

      for (int attempt = 0; attempt < p.objects_per_scene(); ++attempt) {
        std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
        const std::size_t target = pick(rng);
        TrialRecord r = base_record(remaining[target], scene, attempt);
        r.clutter = scene::ClutterState{n_initial, static_cast<int>(remaining.size()), o_initial,
                                        std::clamp(o_now, 0.0, o_initial)};
        r.q_c = scene::clutter_score(*r.clutter, n_initial);
        r.q_p = detail::draw_q_p(rng, truth, r.q_c);
        detail::draw_trial(rng, truth, p.level, r);
        if (r.outcome == TrialOutcome::success && remaining.size() > 1) {
          // recompute rather than subtract, so o_before only ever moves down
          remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(target));
          footprint.erase(footprint.begin() + static_cast<std::ptrdiff_t>(target));
          double s = 0.0;
          for (double f : footprint) s += f;
          o_now = std::min(o_now, s);
        }
        log.records.push_back(std::move(r));
      }
    }
  }
  return log;
}

/// Every level and gripper in one log (4 x 3 tasks, 1,740 records).
inline io::TrialLog simulate_all(const GeneratorTruth& truth, std::uint64_t seed) {
  io::TrialLog all;
  all.seed = seed;
  for (int level = 1; level <= 4; ++level)
    for (GripperType g : kGrippers) {
      io::TrialLog part = simulate({level, g}, truth, seed);
      all.records.insert(all.records.end(), part.records.begin(), part.records.end());
    }
  return all;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string scene_id;  // empty for log-level findings
  int trial_index = -1;
  std::string message;
};

inline constexpr double kClutterTolerance = 1e-12;

/// Protocol conformance of the records for one (level, gripper) task.
inline std::vector<Violation> validate(std::span<const TrialRecord> records, const ProtocolSpec& p) {
  check_protocol(p);
  std::vector<Violation> out;
  std::vector<std::size_t> mine;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].experiment_level == p.level && records[i].gripper == p.gripper) mine.push_back(i);

  const std::string task = "level " + std::to_string(p.level) + " " + std::string(to_string(p.gripper));
  if (static_cast<int>(mine.size()) != p.expected_trials())
    out.push_back({"", -1, task + ": " + std::to_string(mine.size()) + " trials, protocol expects " +
                               std::to_string(p.expected_trials())});

  std::map<std::string, std::vector<std::size_t>> scenes;
  for (std::size_t i : mine) {
    const TrialRecord& r = records[i];
    if (auto err = scoring::check_record(r)) out.push_back({r.scene_id, r.trial_index, *err});
    if (p.level == 1 && r.q_c != 0.0)
      out.push_back({r.scene_id, r.trial_index, "level-1 record has Q_C = " + std::to_string(r.q_c) + ", expected 0"});
    if (p.drops_bags() && suction_excluded(r.category))
      out.push_back({r.scene_id, r.trial_index,
                     "category " + std::string(to_string(r.category)) + " is excluded for suction in clutter"});
    if (p.level >= 2) {
      if (!r.clutter) {
        out.push_back({r.scene_id, r.trial_index, "cluttered-scene record has no clutter state"});
      } else {
        if (r.clutter->n_initial != p.objects_per_scene())
          out.push_back({r.scene_id, r.trial_index,
                         "scene starts with " + std::to_string(r.clutter->n_initial) + " objects, protocol expects " +
                             std::to_string(p.objects_per_scene())});
        try {
          if (std::abs(scene::clutter_score(*r.clutter) - r.q_c) > kClutterTolerance)
            out.push_back({r.scene_id, r.trial_index, "Q_C does not match the clutter state"});
        } catch (const Error& e) {
          out.push_back({r.scene_id, r.trial_index, e.what()});
        }
      }
    }
    scenes[r.scene_id].push_back(i);
  }

  for (auto& [id, idx] : scenes) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].trial_index < records[b].trial_index; });
    if (p.level >= 2 && static_cast<int>(idx.size()) != p.objects_per_scene())
      out.push_back({id, -1, "scene has " + std::to_string(idx.size()) + " attempts, protocol expects " +
                                 std::to_string(p.objects_per_scene())});
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const TrialRecord& prev = records[idx[k - 1]];
      const TrialRecord& cur = records[idx[k]];
      if (cur.trial_index == prev.trial_index)
        out.push_back({id, cur.trial_index, "duplicate trial_index in scene"});
      if (cur.q_c > prev.q_c + kClutterTolerance)
        out.push_back({id, cur.trial_index, "Q_C increased within the scene"});
      if (cur.clutter && prev.clutter) {
        if (cur.clutter->n_before > prev.clutter->n_before)
          out.push_back({id, cur.trial_index, "object count increased within the scene"});
        if (cur.clutter->o_before > prev.clutter->o_before)
          out.push_back({id, cur.trial_index, "occupancy increased within the scene"});
      }
    }
  }
  return out;
}

/// Validates every (level, gripper) task present in the records.
inline std::vector<Violation> validate(std::span<const TrialRecord> records) {
  std::vector<Violation> out;
  std::map<std::pair<int, GripperType>, bool> tasks;
  for (const auto& r : records) {
    if (r.experiment_level < 1 || r.experiment_level > 4) {
      out.push_back({r.scene_id, r.trial_index, "experiment_level must be 1-4"});
      continue;
    }
    tasks[{r.experiment_level, r.gripper}] = true;
  }
  for (const auto& [key, _] : tasks) {
    auto v = validate(records, ProtocolSpec{key.first, key.second});
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Known-truth regression data
// ---------------------------------------------------------------------------

/// Rows drawn directly from the mean model with the true coefficients. The
/// protocol generator forces failures on the zero-pose branch and zeroes S_B,
/// S_F on failed trials, so its responses are not a clean draw from any one
/// model; this gives the coverage tests an exact truth to recover.
inline std::vector<inference::ModelRow> draw_model_rows(const GeneratorTruth& truth, inference::Outcome outcome,
                                                        std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(detail::mix(seed ^ (0x51ULL + static_cast<std::uint64_t>(outcome))));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> cat(0, 6), obj(0, kObjectsPerCategory - 1);
  std::normal_distribution<double> jitter(0.0, 0.04);
  std::vector<inference::ModelRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    inference::ModelRow r;
    r.gripper = kGrippers[i % kGrippers.size()];
    const auto o = detail::make_object(truth, kCategories[static_cast<std::size_t>(cat(rng))], obj(rng));
    r.q_o = std::clamp(o.q_o + jitter(rng), 0.0, 1.0);
    r.q_c = u(rng) < 0.25 ? 0.0 : 0.05 + 0.95 * u(rng);
    r.q_p = detail::draw_q_p(rng, truth, r.q_c);
    const double mu = inference::sigmoid(detail::eta(truth.of(outcome), r.q_o, r.q_p, r.q_c, r.gripper));
    r.response = outcome == inference::Outcome::sp ? (u(rng) < mu ? 1.0 : 0.0) : detail::beta_draw(rng, mu, truth.precision);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace grab::harness
