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

#include <gtest/gtest.h>

#include "grab/scoring.hpp"

using namespace grab;
using namespace grab::scoring;

namespace {

TrialRecord rec(TrialOutcome o, GripperType g = GripperType::rigid, std::optional<double> tc = std::nullopt,
                int level = 2) {
  TrialRecord r;
  r.experiment_level = level;
  r.scene_id = "s";
  r.gripper = g;
  r.outcome = o;
  r.failure = o == TrialOutcome::success ? FailureMode::none : FailureMode::CL;
  if (o != TrialOutcome::fail) {
    r.timeline = HoldTimeline{0, 10, 10};
    r.cycle_time_s = tc.value_or(10.0);
  }
  return r;
}

ForceSeries series(std::initializer_list<std::pair<double, double>> pts) {
  ForceSeries s;
  for (auto [t, v] : pts) s.samples.push_back({t, v});
  return s;
}

}  // namespace

TEST(GraspScore, ZeroBranchAndTopPose) {
  EXPECT_EQ(grasp_score({}), 0.0);
  std::vector<geometry::ExecutablePose> one(1);
  one[0].quality = 0.73;
  EXPECT_EQ(grasp_score(one), 0.73);
  std::vector<geometry::ExecutablePose> two(2);
  two[0].quality = 0.9;
  two[1].quality = 0.4;
  EXPECT_EQ(grasp_score(two), 0.9);
}

TEST(SuccessScore, AllBranches) {
  EXPECT_EQ(success_score(TrialOutcome::success), 1.0);
  EXPECT_EQ(success_score(TrialOutcome::dropped_transit), 0.5);
  EXPECT_EQ(success_score(TrialOutcome::fail), 0.0);
}

TEST(DetectDrop, HeldThroughout) {
  const auto s = series({{0, 5}, {1, 5}, {2, 5}, {3, 5}});
  EXPECT_EQ(detect_drop(s, 0, 3), 3.0);
}

TEST(DetectDrop, DropAtMidpoint) {
  const auto s = series({{0, 5}, {1, 5}, {2, 0}, {3, 0}, {4, 0}});
  EXPECT_EQ(detect_drop(s, 0, 4), 2.0);
}

TEST(DetectDrop, MomentaryDipIsNotADrop) {
  const auto s = series({{0, 5}, {1, 0}, {2, 5}, {3, 5}});
  EXPECT_EQ(detect_drop(s, 0, 3), 3.0);
  EXPECT_EQ(detect_drop(series({{0, 5}, {1, 0}, {2, 5}, {3, 0}}), 0, 3), 3.0);  // last sample below: t3
}

TEST(DetectDrop, ExplicitThresholdAndErrors) {
  const auto s = series({{0, 5}, {1, 3}, {2, 1}, {3, 1}});
  EXPECT_EQ(detect_drop(s, 0, 3, 1.5), 2.0);
  try {
    detect_drop(s, 0, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::coverage);
  }
  try {
    detect_drop(s, 2, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_window);
  }
}

TEST(StabilityScore, Branches) {
  EXPECT_EQ(stability_score({2, 12, 12}), 1.0);
  EXPECT_EQ(stability_score({0, 5, 10}), 0.5);
  EXPECT_EQ(stability_score({3, 3, 10}), 0.0);
  try {
    stability_score({4, 4, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_window);
  }
}

TEST(EfficiencyScore, Branches) {
  EXPECT_EQ(efficiency_score(10, 10, 20), 1.0);
  EXPECT_EQ(efficiency_score(20, 10, 20), 0.0);
  EXPECT_EQ(efficiency_score(15, 10, 20), 0.5);
  EXPECT_EQ(efficiency_score(7, 7, 7), 1.0);
  EXPECT_THROW(efficiency_score(25, 10, 20), Error);
}

TEST(NormalizeEfficiency, GroupsAndDegenerateRule) {
  std::vector<TrialRecord> r{rec(TrialOutcome::success, GripperType::rigid, 10.0),
                             rec(TrialOutcome::success, GripperType::rigid, 20.0),
                             rec(TrialOutcome::success, GripperType::finray, 33.0),
                             rec(TrialOutcome::dropped_transit, GripperType::rigid, 5.0),
                             rec(TrialOutcome::fail, GripperType::suction)};
  const auto sf = normalize_efficiency(r);
  EXPECT_EQ(sf[0], 1.0);
  EXPECT_EQ(sf[1], 0.0);
  EXPECT_EQ(sf[2], 1.0);  // lone success in its group
  EXPECT_EQ(sf[3], 0.0);  // not a success: outside the pool
  EXPECT_EQ(sf[4], 0.0);
}

TEST(ScoreTrials, FailedTrialsZero) {
  std::vector<TrialRecord> r{rec(TrialOutcome::fail)};
  const auto s = score_trials(r);
  EXPECT_EQ(s[0].sp, 0.0);
  EXPECT_EQ(s[0].sb, 0.0);
  EXPECT_EQ(s[0].sf, 0.0);
}

TEST(CheckRecord, Invariants) {
  TrialRecord r = rec(TrialOutcome::success);
  EXPECT_FALSE(check_record(r).has_value());
  r.q_o = 1.2;
  EXPECT_TRUE(check_record(r).has_value());
  r = rec(TrialOutcome::fail);
  r.cycle_time_s = 3.0;
  EXPECT_TRUE(check_record(r).has_value());
  r = rec(TrialOutcome::success);
  r.failure = FailureMode::SL;
  EXPECT_TRUE(check_record(r).has_value());
}

TEST(AggregateProfiles, Means) {
  std::vector<TrialRecord> all_good{rec(TrialOutcome::success), rec(TrialOutcome::success)};
  auto p = aggregate_profiles(all_good);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0].mean_sp, 1.0);
  EXPECT_EQ(p[0].mean_sb, 1.0);
  EXPECT_EQ(p[0].mean_sf, 1.0);
  EXPECT_EQ(p[0].n_trials, 2u);

  std::vector<TrialRecord> mixed{rec(TrialOutcome::success), rec(TrialOutcome::fail)};
  p = aggregate_profiles(mixed);
  EXPECT_EQ(p[0].mean_sp, 0.5);

  std::vector<TrialRecord> bags;
  for (int i = 0; i < 15; ++i) {
    TrialRecord b = rec(TrialOutcome::fail, GripperType::suction, std::nullopt, 1);
    b.category = ObjectCategory::plastic_bag;
    b.failure = FailureMode::OP;
    bags.push_back(b);
  }
  p = aggregate_profiles(bags);
  EXPECT_EQ(p[0].mean_sp, 0.0);
}

TEST(AggregateProfiles, OrderIndependent) {
  std::vector<TrialRecord> r;
  for (int i = 0; i < 12; ++i) {
    TrialRecord x = rec(i % 3 ? TrialOutcome::success : TrialOutcome::dropped_transit, kGrippers[i % 3],
                        10.0 + i);
    x.category = kCategories[static_cast<std::size_t>(i % 7)];
    x.trial_index = i;
    if (x.outcome == TrialOutcome::dropped_transit) x.timeline = HoldTimeline{0, 0.1 * i, 10};
    r.push_back(x);
  }
  const auto a = aggregate_profiles(r);
  std::reverse(r.begin(), r.end());
  const auto b = aggregate_profiles(r);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_sp, b[i].mean_sp);
    EXPECT_EQ(a[i].mean_sb, b[i].mean_sb);
    EXPECT_EQ(a[i].mean_sf, b[i].mean_sf);
  }
}
