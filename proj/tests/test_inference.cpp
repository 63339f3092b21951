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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "grab/inference.hpp"
#include "grab/simulate.hpp"
#include "oracles.hpp"
#include "reference_values.hpp"

using namespace grab;
using namespace grab::inference;

namespace {

DesignMatrix two_column(const std::vector<double>& x, const std::vector<double>& y) {
  DesignMatrix d;
  d.columns = {"Intercept", "x"};
  d.x.resize(static_cast<Eigen::Index>(x.size()), 2);
  d.y.resize(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    d.x(static_cast<Eigen::Index>(i), 0) = 1.0;
    d.x(static_cast<Eigen::Index>(i), 1) = x[i];
    d.y(static_cast<Eigen::Index>(i)) = y[i];
  }
  return d;
}

}  // namespace

TEST(OddsRatio, PublishedCoefficients) {
  // exp(coef) reproduces the printed OR to the precision the coefficient was
  // printed with: a 4-decimal coefficient carries up to 5e-5 of rounding,
  // which moves exp(coef) by OR * 5e-5, plus 5e-4 from rounding the OR itself.
  for (const auto& row : reference::kOddsRatioTable) {
    const double want = std::exp(row.coef);
    const double slack = want * std::expm1(5e-5) + 5e-4 + 1e-9;
    EXPECT_LE(std::abs(want - row.odds_ratio), slack) << row.term << " " << row.outcome;
  }
}

TEST(OddsRatio, LiteralToleranceMisses) {
  // At a flat 0.001 the rows whose OR is large, or whose coefficient rounding
  // happens to land badly, miss. The test pins which ones, so a transcription
  // error in the table is caught.
  std::vector<std::string> misses;
  for (const auto& row : reference::kOddsRatioTable)
    if (std::abs(std::exp(row.coef) - row.odds_ratio) > 1e-3) misses.push_back(row.term + "/" + row.outcome);
  const std::vector<std::string> expected{"Q_P/sp", "Q_P/sb", "Q_O/sp", "Suction vs Rigid/sp",
                                          "Suction vs Rigid/sb", "Suction vs Rigid/sf"};
  EXPECT_EQ(misses, expected);
  EXPECT_EQ(reference::kOddsRatioTable.size(), 33u);
}

TEST(OddsRatio, ZeroCoefficient) {
  FitResult f;
  f.estimate = VectorXd::Zero(1);
  f.p_value = VectorXd::Ones(1);
  f.ci_low = f.ci_high = VectorXd::Ones(1);
  f.columns = {"Intercept"};
  EXPECT_EQ(odds_ratio_table(f)[0].odds_ratio, 1.0);
}

TEST(WaldTest, Examples) {
  EXPECT_EQ(wald_test(0.0, 1.0).p, 1.0);
  EXPECT_NEAR(wald_test(1.96, 1.0).p, 0.05, 1e-3);
  EXPECT_NEAR(wald_test(3.0, 1.0).p, 0.0027, 1e-4);
  // erf series oracle at z = 3
  double erf = 0.0, term = 3.0 / std::sqrt(2.0);
  const double x = 3.0 / std::sqrt(2.0);
  for (int n = 0; n < 80; ++n) {
    erf += term / (2 * n + 1);
    term *= -x * x / (n + 1);
  }
  erf *= 2.0 / std::sqrt(std::acos(-1.0));
  EXPECT_NEAR(wald_test(-3.0, 1.0).p, 1.0 - erf, 1e-12);
  EXPECT_THROW(wald_test(1.0, 0.0), Error);
}

TEST(Design, ReferenceCoding) {
  const auto r = design_row(0.4, 0.7, 0.2, GripperType::rigid);
  for (int j = 4; j < kDesignColumns; ++j) EXPECT_EQ(r(j), 0.0);
  const auto f = design_row(0.4, 0.7, 0.2, GripperType::finray);
  EXPECT_EQ(f(4), 1.0);
  EXPECT_EQ(f(5), 0.0);
  EXPECT_EQ(f(8), 0.4);  // Q_O x Finray
  EXPECT_EQ(design_column_names()[8], "Q_O x Finray");
  EXPECT_EQ(design_column_names()[0], "Intercept");
}

TEST(Design, HalfAsPolicies) {
  std::vector<scoring::TrialRecord> recs(3);
  recs[0].outcome = TrialOutcome::success;
  recs[0].failure = FailureMode::none;
  recs[1].outcome = TrialOutcome::dropped_transit;
  recs[1].failure = FailureMode::SL;
  recs[2].outcome = TrialOutcome::fail;
  recs[2].failure = FailureMode::CL;
  for (auto& r : recs)
    if (r.outcome != TrialOutcome::fail) r.timeline = scoring::HoldTimeline{0, 1, 1}, r.cycle_time_s = 1.0;
  EXPECT_EQ(build_design(recs, {Outcome::sp, HalfAs::fail}).y(1), 0.0);
  EXPECT_EQ(build_design(recs, {Outcome::sp, HalfAs::success}).y(1), 1.0);
  const auto d = build_design(recs, {Outcome::sp, HalfAs::drop_row});
  EXPECT_EQ(d.y.size(), 2);
  EXPECT_EQ(d.source_rows, (std::vector<std::size_t>{0, 2}));
}

TEST(Design, RankErrorNamesColumns) {
  std::vector<ModelRow> rows;
  for (int i = 0; i < 40; ++i) rows.push_back({0.1 * (i % 7), 0.05 * (i % 11), 0.0, kGrippers[i % 3], i % 2 ? 1.0 : 0.0});
  const auto d = build_design(rows);  // Q_C is constant zero
  EXPECT_EQ(oracle::rank(d.x), 9);
  try {
    fit_logistic(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::rank);
    EXPECT_NE(std::string(e.what()).find("Q_C"), std::string::npos);
  }
  EXPECT_EQ(collinear_columns(d.x).size(), 3u);
}

TEST(FitLogistic, MatchesGridSearchOracle) {
  const std::vector<double> x{-1.5, -1.0, -0.4, 0.0, 0.3, 0.9, 1.4, 2.0};
  const std::vector<double> y{0, 0, 1, 0, 1, 0, 1, 1};
  const FitResult f = fit_logistic(two_column(x, y));
  const auto g = oracle::grid_mle(x, y);
  EXPECT_TRUE(f.converged);
  EXPECT_NEAR(f.estimate(0), g.b0, 2e-3);
  EXPECT_NEAR(f.estimate(1), g.b1, 2e-3);
  for (std::size_t i = 1; i < f.log_likelihood_history.size(); ++i)
    EXPECT_GE(f.log_likelihood_history[i], f.log_likelihood_history[i - 1]);
}

TEST(FitFractional, BinaryResponseMatchesLogistic) {
  const auto rows = harness::draw_model_rows(harness::GeneratorTruth{}, Outcome::sp, 1500, 3);
  const auto d = build_design(rows);
  const FitResult a = fit_logistic(d), b = fit_fractional_logit(d);
  EXPECT_LT((a.estimate - b.estimate).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LT((a.information_se - b.information_se).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_EQ(b.se, b.robust_se);
}

TEST(FitFractional, ConstantHalfGivesZeroIntercept) {
  DesignMatrix d;
  d.columns = {"Intercept"};
  d.x = MatrixXd::Ones(10, 1);
  d.y = VectorXd::Constant(10, 0.5);
  const FitResult f = fit_fractional_logit(d);
  EXPECT_NEAR(f.estimate(0), 0.0, 1e-12);
}

TEST(FitLogistic, IntervalCoverageOnKnownTruth) {
  const harness::GeneratorTruth truth;
  const auto& beta = truth.of(Outcome::sp);
  const int reps = 50;
  std::array<int, kDesignColumns> hit{};
  for (int r = 0; r < reps; ++r) {
    const FitResult f = fit_logistic(build_design(harness::draw_model_rows(truth, Outcome::sp, 1000, 1000 + r)));
    for (int j = 0; j < kDesignColumns; ++j)
      hit[static_cast<std::size_t>(j)] += std::abs(f.estimate(j) - beta[static_cast<std::size_t>(j)]) <= kCiZ * f.se(j);
  }
  for (int j = 0; j < kDesignColumns; ++j) EXPECT_GE(hit[static_cast<std::size_t>(j)], 42) << design_column_names()[static_cast<std::size_t>(j)];
}

TEST(Separation, DedicatedDummyFlagged) {
  // suction always succeeds, the others are mixed
  std::vector<ModelRow> rows;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    ModelRow r{u(rng), u(rng), u(rng), kGrippers[static_cast<std::size_t>(i % 3)], 0.0};
    r.response = r.gripper == GripperType::suction ? 1.0 : (u(rng) < 0.5 ? 1.0 : 0.0);
    rows.push_back(r);
  }
  const FitResult f = fit_logistic(build_design(rows));
  EXPECT_TRUE(f.separation[5]);  // Suction vs Rigid
  bool any_finray_main = f.separation[4];
  EXPECT_FALSE(any_finray_main);
}

TEST(Separation, CleanFitHasNoFlags) {
  const auto d = build_design(harness::draw_model_rows(harness::GeneratorTruth{}, Outcome::sp, 3000, 9));
  const FitResult f = fit_logistic(d);
  EXPECT_TRUE(f.converged);
  for (bool s : f.separation) EXPECT_FALSE(s);
}

TEST(Separation, PerfectlySeparatedToy) {
  const FitResult f = fit_logistic(two_column({-2, -1, -0.5, 0.5, 1, 2}, {0, 0, 0, 1, 1, 1}));
  EXPECT_TRUE(!f.converged || f.separation[1]);
  EXPECT_TRUE(f.separation[1]);
}

TEST(Pearson, SelfAndAnti) {
  std::vector<ModelRow> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({0.1 * i, 1.0 - 0.1 * i, 0.05 * i * i, GripperType::rigid, 0});
  const Mat3 r = pearson_correlations(std::span<const ModelRow>(rows));
  EXPECT_EQ(r(0, 0), 1.0);
  EXPECT_NEAR(r(0, 1), -1.0, 1e-12);
  EXPECT_NEAR(r(0, 2), r(2, 0), 1e-15);
  for (auto& x : rows) x.q_c = 0.0;
  EXPECT_THROW(pearson_correlations(std::span<const ModelRow>(rows)), Error);
}

TEST(Kde, Shapes) {
  const std::vector<double> one{0.5};
  const auto grid = linear_grid(0.0, 1.0, 101);
  const auto d = kernel_density(one, 0.1, grid);
  EXPECT_EQ(std::max_element(d.begin(), d.end()) - d.begin(), 50);
  for (int i = 0; i < 50; ++i) EXPECT_NEAR(d[static_cast<std::size_t>(i)], d[static_cast<std::size_t>(100 - i)], 1e-12);
  const std::vector<double> two{0.1, 0.9};
  const auto b = kernel_density(two, 0.05, grid);
  EXPECT_NEAR(b[10], b[90], 1e-12);
  EXPECT_LT(b[50], 0.01 * b[10]);
  EXPECT_THROW(kernel_density(two, 0.0, grid), Error);
  EXPECT_GT(silverman_bandwidth(two), 0.0);
}

TEST(PartialDependence, FlatAndDirectEvaluation) {
  FitResult f;
  f.estimate = VectorXd::Zero(kDesignColumns);
  f.estimate(0) = 0.3;
  std::vector<ModelRow> rows{{0.2, 0.5, 0.1, GripperType::finray, 1}};
  const auto grid = linear_grid(0, 1, 5);
  const auto flat = partial_dependence(f, rows, Predictor::q_p, GripperType::rigid, grid);
  for (double v : flat.value) EXPECT_DOUBLE_EQ(v, sigmoid(0.3));

  f.estimate(1) = 1.5;   // Q_P
  f.estimate(6) = -0.4;  // Q_P x Finray
  const auto c = partial_dependence(f, rows, Predictor::q_p, GripperType::finray, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    EXPECT_NEAR(c.value[i], sigmoid(0.3 + 1.5 * grid[i] - 0.4 * grid[i]), 1e-15);
}

TEST(FormatTable, FixedDecimals) {
  FitResult f;
  f.columns = {"Q_P"};
  f.estimate = VectorXd::Constant(1, 3.7457);
  f.p_value = VectorXd::Constant(1, 0.0171);
  f.ci_low = VectorXd::Constant(1, 2.0);
  f.ci_high = VectorXd::Constant(1, 900.0);
  const std::string s = format_odds_ratio_table(odds_ratio_table(f));
  EXPECT_NE(s.find("Q_P,3.7457,42.339,0.017,2.000,900.000"), std::string::npos);
  EXPECT_EQ(format_fixed(-0.0001, 3), "0.000");
}
