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

// Per-trial performance metrics (success, stability, efficiency), the grasp
// score Q_P, and category/gripper aggregation for radar inputs.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "grab/core.hpp"
#include "grab/geometry.hpp"
#include "grab/scene.hpp"

namespace grab::scoring {

struct HoldTimeline {
  double t1 = 0.0;  // grasp
  double t2 = 0.0;  // drop (== t3 when held)
  double t3 = 0.0;  // end point
};

struct ForceSample {
  double time = 0.0;
  double value = 0.0;
};

struct ForceSeries {
  std::vector<ForceSample> samples;  // strictly increasing times
};

struct TrialRecord {
  int experiment_level = 1;
  std::string scene_id;
  int trial_index = 0;
  GripperType gripper = GripperType::rigid;
  ObjectCategory category = ObjectCategory::plastic_bag;
  std::string object_id;
  double q_o = 0.0;
  double q_p = 0.0;
  double q_c = 0.0;
  std::optional<scene::ClutterState> clutter;
  TrialOutcome outcome = TrialOutcome::fail;
  FailureMode failure = FailureMode::none;
  std::optional<HoldTimeline> timeline;
  std::optional<double> cycle_time_s;
  std::string extra_json;  // unknown input fields, serialised verbatim
};

struct TrialScores {
  double sp = 0.0;
  double sb = 0.0;
  double sf = 0.0;
};

struct CategoryProfile {
  int level = 1;
  ObjectCategory category = ObjectCategory::plastic_bag;
  GripperType gripper = GripperType::rigid;
  double mean_sp = 0.0;
  double mean_sb = 0.0;
  double mean_sf = 0.0;
  std::size_t n_trials = 0;
};

inline constexpr double kDefaultZeroFraction = 0.02;

/// First violated record invariant, if any.
inline std::optional<std::string> check_record(const TrialRecord& r) {
  if (r.experiment_level < 1 || r.experiment_level > 4) return "experiment_level must be 1-4";
  if (!in_unit_interval(r.q_o)) return "q_o out of range [0,1]";
  if (!in_unit_interval(r.q_p)) return "q_p out of range [0,1]";
  if (!in_unit_interval(r.q_c)) return "q_c out of range [0,1]";
  const bool executed = r.outcome != TrialOutcome::fail;
  if (r.cycle_time_s.has_value() != executed) return "cycle_time_s must be present iff outcome is not fail";
  if (r.timeline.has_value() != executed) return "timeline must be present iff outcome is not fail";
  if ((r.failure == FailureMode::none) != (r.outcome == TrialOutcome::success))
    return "failure mode must be none iff outcome is success";
  if (r.timeline) {
    const auto& t = *r.timeline;
    if (!(t.t1 <= t.t2 && t.t2 <= t.t3 && t.t3 > t.t1)) return "timeline must satisfy t1 <= t2 <= t3, t3 > t1";
  }
  if (r.cycle_time_s && !(*r.cycle_time_s >= 0.0 && std::isfinite(*r.cycle_time_s)))
    return "cycle_time_s must be a non-negative number";
  if (r.clutter) {
    const auto& c = *r.clutter;
    if (c.n_before < 1 || c.n_before > c.n_initial) return "clutter counts must satisfy 1 <= n_before <= n_initial";
    if (!(c.o_initial > 0.0 && c.o_initial <= 1.0)) return "clutter o_initial must lie in (0,1]";
    if (!in_unit_interval(c.o_before)) return "clutter o_before must lie in [0,1]";
  }
  return std::nullopt;
}

/// Zero when no executable pose survived filtering, else the top pose's quality.
inline double grasp_score(std::span<const geometry::ExecutablePose> filtered) {
  if (filtered.empty()) return 0.0;
  const double q = filtered.front().quality;
  require(in_unit_interval(q), ErrorKind::domain, "pose quality must lie in [0,1]");
  return q;
}

inline double success_score(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::success: return 1.0;
    case TrialOutcome::dropped_transit: return 0.5;
    case TrialOutcome::fail: return 0.0;
  }
  return 0.0;
}

/// Earliest sample in [t1, t3] from which the signal stays at or below the
/// threshold until t3; t3 when the object was held throughout. Without an
/// explicit threshold, 2% of the series peak is used.
inline double detect_drop(const ForceSeries& series, double t1, double t3,
                          std::optional<double> zero_threshold = std::nullopt) {
  const auto& s = series.samples;
  require(t3 > t1, ErrorKind::degenerate_window, "hold window must satisfy t3 > t1");
  require(!s.empty() && s.front().time <= t1 && s.back().time >= t3, ErrorKind::coverage,
          "force series does not cover the hold window");
  for (std::size_t i = 1; i < s.size(); ++i)
    require(s[i].time > s[i - 1].time, ErrorKind::data, "force series times must be strictly increasing");

  double threshold = 0.0;
  if (zero_threshold) {
    threshold = *zero_threshold;
  } else {
    double peak = 0.0;
    for (const auto& p : s) peak = std::max(peak, std::abs(p.value));
    threshold = kDefaultZeroFraction * peak;
  }

  // Suffix scan backwards over the window.
  std::optional<double> drop;
  for (std::size_t i = s.size(); i-- > 0;) {
    if (s[i].time > t3) continue;
    if (s[i].time < t1) break;
    if (s[i].value > threshold) break;
    drop = s[i].time;
  }
  return drop.value_or(t3);
}

inline double stability_score(const HoldTimeline& tl) {
  require(tl.t3 != tl.t1, ErrorKind::degenerate_window, "hold window has zero length");
  require(tl.t1 <= tl.t2 && tl.t2 <= tl.t3 && tl.t3 > tl.t1, ErrorKind::domain,
          "timeline must satisfy t1 <= t2 <= t3");
  if (tl.t2 == tl.t3) return 1.0;
  return (tl.t2 - tl.t1) / (tl.t3 - tl.t1);
}

inline double efficiency_score(double t_c, double t_min, double t_max) {
  require(t_min <= t_c && t_c <= t_max, ErrorKind::domain, "cycle time outside [t_min, t_max]");
  if (t_max == t_min) return 1.0;
  return 1.0 - (t_c - t_min) / (t_max - t_min);
}

/// Stability of one record: the measured timeline when present, else 0.
inline double record_stability(const TrialRecord& r) {
  if (r.outcome == TrialOutcome::fail || !r.timeline) return 0.0;
  return stability_score(*r.timeline);
}

/// S_F per record (input order). The timing pool is the successful trials of
/// each (experiment_level, gripper) group; all other trials score 0.
inline std::vector<double> normalize_efficiency(std::span<const TrialRecord> records) {
  std::map<std::pair<int, GripperType>, std::pair<double, double>> pools;
  for (const auto& r : records) {
    if (r.outcome != TrialOutcome::success || !r.cycle_time_s) continue;
    const auto key = std::make_pair(r.experiment_level, r.gripper);
    const double t = *r.cycle_time_s;
    auto [it, inserted] = pools.try_emplace(key, t, t);
    if (!inserted) {
      it->second.first = std::min(it->second.first, t);
      it->second.second = std::max(it->second.second, t);
    }
  }
  std::vector<double> out(records.size(), 0.0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.outcome != TrialOutcome::success || !r.cycle_time_s) continue;
    const auto& [t_min, t_max] = pools.at({r.experiment_level, r.gripper});
    out[i] = efficiency_score(*r.cycle_time_s, t_min, t_max);
  }
  return out;
}

inline std::vector<TrialScores> score_trials(std::span<const TrialRecord> records) {
  const std::vector<double> sf = normalize_efficiency(records);
  std::vector<TrialScores> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out[i].sp = success_score(records[i].outcome);
    out[i].sb = record_stability(records[i]);
    out[i].sf = sf[i];
  }
  return out;
}

/// Record indices in the canonical fold order (scene_id, trial_index, input position).
inline std::vector<std::size_t> fold_order(std::span<const TrialRecord> records) {
  std::vector<std::size_t> idx(records.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(records[a].scene_id, records[a].trial_index) <
           std::tie(records[b].scene_id, records[b].trial_index);
  });
  return idx;
}

/// Mean (S_P, S_B, S_F) per (level, category, gripper); failed trials enter
/// with S_B = S_F = 0. Output ordered by level, category, gripper.
inline std::vector<CategoryProfile> aggregate_profiles(std::span<const TrialRecord> records) {
  const std::vector<TrialScores> scores = score_trials(records);
  struct Acc {
    double sp = 0, sb = 0, sf = 0;
    std::size_t n = 0;
  };
  std::map<std::tuple<int, ObjectCategory, GripperType>, Acc> groups;
  for (std::size_t i : fold_order(records)) {
    const auto& r = records[i];
    Acc& a = groups[{r.experiment_level, r.category, r.gripper}];
    a.sp += scores[i].sp;
    a.sb += scores[i].sb;
    a.sf += scores[i].sf;
    ++a.n;
  }
  std::vector<CategoryProfile> out;
  out.reserve(groups.size());
  for (const auto& [key, a] : groups) {
    const auto n = static_cast<double>(a.n);
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), a.sp / n, a.sb / n, a.sf / n, a.n});
  }
  return out;
}

}  // namespace grab::scoring
