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

// Statistical layer: exploratory statistics, the gripper-interaction design,
// logistic and fractional-logit fits by IRLS, Wald inference, separation
// flags and partial dependence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grab/core.hpp"
#include "grab/scoring.hpp"

namespace grab::inference {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class Outcome { sp, sb, sf };
enum class HalfAs { fail, success, drop_row };
enum class Family { logistic, fractional_logit };
enum class Predictor { q_o, q_p, q_c };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::sp: return "sp";
    case Outcome::sb: return "sb";
    case Outcome::sf: return "sf";
  }
  return "?";
}

inline std::string_view to_string(Predictor p) {
  switch (p) {
    case Predictor::q_o: return "Q_O";
    case Predictor::q_p: return "Q_P";
    case Predictor::q_c: return "Q_C";
  }
  return "?";
}

inline std::optional<Outcome> parse_outcome(std::string_view s) {
  if (s == "sp") return Outcome::sp;
  if (s == "sb") return Outcome::sb;
  if (s == "sf") return Outcome::sf;
  return std::nullopt;
}

inline std::optional<HalfAs> parse_half_as(std::string_view s) {
  if (s == "fail") return HalfAs::fail;
  if (s == "success") return HalfAs::success;
  if (s == "drop-row") return HalfAs::drop_row;
  return std::nullopt;
}

struct ModelSpec {
  Outcome outcome = Outcome::sp;
  HalfAs half_as = HalfAs::fail;
};

/// One observation of the mean model: predictors, gripper level, response in [0,1].
struct ModelRow {
  double q_o = 0.0;
  double q_p = 0.0;
  double q_c = 0.0;
  GripperType gripper = GripperType::rigid;
  double response = 0.0;
};

inline constexpr int kDesignColumns = 12;

inline const std::array<std::string, kDesignColumns>& design_column_names() {
  static const std::array<std::string, kDesignColumns> names{
      "Intercept",    "Q_P",          "Q_C",          "Q_O",           "Finray vs Rigid", "Suction vs Rigid",
      "Q_P x Finray", "Q_C x Finray", "Q_O x Finray", "Q_P x Suction", "Q_C x Suction",   "Q_O x Suction"};
  return names;
}

struct DesignMatrix {
  MatrixXd x;
  VectorXd y;
  std::vector<std::string> columns;
  std::vector<std::size_t> source_rows;  // index of the originating record/row
};

struct FitResult {
  Family family = Family::logistic;
  std::vector<std::string> columns;
  VectorXd estimate;
  VectorXd se;  // primary: information for logistic, robust for fractional
  VectorXd information_se;
  VectorXd robust_se;
  VectorXd z;
  VectorXd p_value;
  VectorXd odds_ratio;
  VectorXd ci_low;   // odds-ratio scale
  VectorXd ci_high;  // odds-ratio scale
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<bool> separation;
  std::vector<VectorXd> beta_history;          // iterate after each accepted step, entry 0 = start
  std::vector<double> log_likelihood_history;  // aligned with beta_history
  std::size_t n_obs = 0;
};

struct FitOptions {
  int max_iterations = 100;
  double tolerance = 1e-8;  // max |delta beta|
  double clip = 1e-10;
};

inline constexpr double kCiZ = 1.96;

inline double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct WaldResult {
  double z = 0.0;
  double p = 1.0;
};

inline WaldResult wald_test(double estimate, double se) {
  require(se > 0.0, ErrorKind::domain, "standard error must be positive");
  const double z = estimate / se;
  // 2 (1 - Phi(|z|)) == erfc(|z| / sqrt 2), without cancellation in the tail.
  return {z, std::erfc(std::abs(z) / std::numbers::sqrt2)};
}

// ---------------------------------------------------------------------------
// Exploratory statistics
// ---------------------------------------------------------------------------

inline double predictor_value(const ModelRow& r, Predictor p) {
  switch (p) {
    case Predictor::q_o: return r.q_o;
    case Predictor::q_p: return r.q_p;
    case Predictor::q_c: return r.q_c;
  }
  return 0.0;
}

inline ModelRow predictors_of(const scoring::TrialRecord& r) { return {r.q_o, r.q_p, r.q_c, r.gripper, 0.0}; }

/// Pearson r over (Q_O, Q_P, Q_C), in that order.
inline Mat3 pearson_correlations(std::span<const ModelRow> rows) {
  require(rows.size() >= 2, ErrorKind::domain, "correlation needs at least two records");
  constexpr std::array preds{Predictor::q_o, Predictor::q_p, Predictor::q_c};
  std::array<double, 3> mean{};
  for (const auto& r : rows)
    for (int k = 0; k < 3; ++k) mean[k] += predictor_value(r, preds[k]);
  for (double& m : mean) m /= static_cast<double>(rows.size());

  Mat3 cov = Mat3::Zero();
  for (const auto& r : rows)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        cov(a, b) += (predictor_value(r, preds[a]) - mean[a]) * (predictor_value(r, preds[b]) - mean[b]);

  for (int k = 0; k < 3; ++k)
    require(cov(k, k) > 0.0, ErrorKind::domain,
            "undefined correlation: " + std::string(to_string(preds[k])) + " has zero variance");
  Mat3 r;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r(a, b) = a == b ? 1.0 : cov(a, b) / std::sqrt(cov(a, a) * cov(b, b));
  return r;
}

inline Mat3 pearson_correlations(std::span<const scoring::TrialRecord> records) {
  std::vector<ModelRow> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(predictors_of(r));
  return pearson_correlations(std::span<const ModelRow>(rows));
}

/// Silverman's rule of thumb: 0.9 min(sd, IQR/1.34) n^(-1/5).
inline double silverman_bandwidth(std::span<const double> values) {
  require(values.size() >= 2, ErrorKind::domain, "bandwidth rule needs at least two values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  auto quantile = [&](double q) {
    const double h = (n - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  require(spread > 0.0, ErrorKind::domain, "bandwidth undefined for constant data");
  return 0.9 * spread * std::pow(n, -0.2);
}

/// Gaussian kernel density estimate evaluated on `grid`.
inline std::vector<double> kernel_density(std::span<const double> values, double bandwidth,
                                          std::span<const double> grid) {
  require(!values.empty(), ErrorKind::domain, "density estimate needs at least one value");
  require(bandwidth > 0.0 && std::isfinite(bandwidth), ErrorKind::domain, "bandwidth must be positive");
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out;
  out.reserve(grid.size());
  for (double g : grid) {
    double acc = 0.0;
    for (double v : values) {
      const double u = (g - v) / bandwidth;
      acc += std::exp(-0.5 * u * u);
    }
    out.push_back(acc * norm);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Design
// ---------------------------------------------------------------------------

inline Eigen::RowVectorXd design_row(double q_o, double q_p, double q_c, GripperType g) {
  const double fin = g == GripperType::finray ? 1.0 : 0.0;
  const double suc = g == GripperType::suction ? 1.0 : 0.0;
  Eigen::RowVectorXd row(kDesignColumns);
  row << 1.0, q_p, q_c, q_o, fin, suc, q_p * fin, q_c * fin, q_o * fin, q_p * suc, q_c * suc, q_o * suc;
  return row;
}

inline DesignMatrix build_design(std::span<const ModelRow> rows) {
  DesignMatrix d;
  d.columns.assign(design_column_names().begin(), design_column_names().end());
  d.x.resize(static_cast<Eigen::Index>(rows.size()), kDesignColumns);
  d.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    require(std::isfinite(r.q_o) && std::isfinite(r.q_p) && std::isfinite(r.q_c), ErrorKind::parse,
            "row " + std::to_string(i) + " has a missing predictor");
    require(in_unit_interval(r.response), ErrorKind::domain,
            "row " + std::to_string(i) + " response outside [0,1]");
    const auto ii = static_cast<Eigen::Index>(i);
    d.x.row(ii) = design_row(r.q_o, r.q_p, r.q_c, r.gripper);
    d.y(ii) = r.response;
    d.source_rows.push_back(i);
  }
  return d;
}

/// Responses for the chosen outcome; S_P = 0.5 rows follow `half_as`.
inline std::vector<ModelRow> model_rows(std::span<const scoring::TrialRecord> records, const ModelSpec& spec,
                                        std::vector<std::size_t>* kept = nullptr) {
  const std::vector<scoring::TrialScores> scores = scoring::score_trials(records);
  std::vector<ModelRow> rows;
  rows.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    ModelRow row = predictors_of(records[i]);
    switch (spec.outcome) {
      case Outcome::sp:
        if (scores[i].sp == 0.5) {
          if (spec.half_as == HalfAs::drop_row) continue;
          row.response = spec.half_as == HalfAs::success ? 1.0 : 0.0;
        } else {
          row.response = scores[i].sp;
        }
        break;
      case Outcome::sb: row.response = scores[i].sb; break;
      case Outcome::sf: row.response = scores[i].sf; break;
    }
    rows.push_back(row);
    if (kept) kept->push_back(i);
  }
  return rows;
}

inline DesignMatrix build_design(std::span<const scoring::TrialRecord> records, const ModelSpec& spec) {
  std::vector<std::size_t> kept;
  const std::vector<ModelRow> rows = model_rows(records, spec, &kept);
  DesignMatrix d = build_design(std::span<const ModelRow>(rows));
  d.source_rows = std::move(kept);
  return d;
}

/// Columns that are linear combinations of earlier columns.
inline std::vector<std::size_t> collinear_columns(const MatrixXd& x) {
  std::vector<std::size_t> bad;
  std::vector<Eigen::Index> basis;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    MatrixXd sub(x.rows(), static_cast<Eigen::Index>(basis.size()) + 1);
    for (std::size_t k = 0; k < basis.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = x.col(basis[k]);
    sub.col(sub.cols() - 1) = x.col(j);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(sub);
    qr.setThreshold(1e-10);
    if (qr.rank() == sub.cols()) {
      basis.push_back(j);
    } else {
      bad.push_back(static_cast<std::size_t>(j));
    }
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

namespace detail {

inline VectorXd mean_of(const MatrixXd& x, const VectorXd& beta, double clip) {
  VectorXd eta = x * beta;
  VectorXd mu(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) mu(i) = std::clamp(sigmoid(eta(i)), clip, 1.0 - clip);
  return mu;
}

/// Bernoulli (quasi-)log-likelihood.
inline double log_likelihood(const VectorXd& y, const VectorXd& mu) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) ll += y(i) * std::log(mu(i)) + (1.0 - y(i)) * std::log1p(-mu(i));
  return ll;
}

}  // namespace detail

inline std::vector<bool> detect_separation(const DesignMatrix& design, const FitResult& fit);

/// Shared IRLS core: identical score equations for binary and fractional
/// responses; only the variance estimate differs between families.
inline FitResult fit_irls(const DesignMatrix& design, Family family, const FitOptions& opt = {}) {
  const MatrixXd& x = design.x;
  const VectorXd& y = design.y;
  require(x.rows() == y.size(), ErrorKind::domain, "design and response lengths differ");
  require(x.rows() > 0, ErrorKind::domain, "design has no rows");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    require(in_unit_interval(y(i)), ErrorKind::domain, "response outside [0,1]");
    if (family == Family::logistic)
      require(y(i) == 0.0 || y(i) == 1.0, ErrorKind::domain, "logistic regression needs a binary response");
  }
  const std::vector<std::size_t> bad = collinear_columns(x);
  if (!bad.empty()) {
    std::string names;
    for (std::size_t j : bad) {
      if (!names.empty()) names += ", ";
      names += j < design.columns.size() ? design.columns[j] : "column " + std::to_string(j);
    }
    throw Error(ErrorKind::rank, "design is rank deficient; collinear columns: " + names);
  }

  const Eigen::Index p = x.cols();
  FitResult fit;
  fit.family = family;
  fit.columns = design.columns;
  fit.n_obs = static_cast<std::size_t>(x.rows());

  VectorXd beta = VectorXd::Zero(p);
  VectorXd mu = detail::mean_of(x, beta, opt.clip);
  double ll = detail::log_likelihood(y, mu);
  fit.beta_history.push_back(beta);
  fit.log_likelihood_history.push_back(ll);

  for (int it = 0; it < opt.max_iterations; ++it) {
    const VectorXd w = mu.array() * (1.0 - mu.array());
    const VectorXd sw = w.array().sqrt();
    const VectorXd z = (x * beta).array() + (y - mu).array() / w.array();
    const MatrixXd wx = sw.asDiagonal() * x;
    const VectorXd wz = sw.array() * z.array();
    const VectorXd full = wx.colPivHouseholderQr().solve(wz);
    if (!full.allFinite()) break;

    const double full_step = (full - beta).cwiseAbs().maxCoeff();
    VectorXd cand = full;
    VectorXd cand_mu = detail::mean_of(x, cand, opt.clip);
    double cand_ll = detail::log_likelihood(y, cand_mu);
    int halvings = 0;
    while (!(cand_ll >= ll) && halvings < 40) {
      cand = 0.5 * (cand + beta);
      cand_mu = detail::mean_of(x, cand, opt.clip);
      cand_ll = detail::log_likelihood(y, cand_mu);
      ++halvings;
    }
    if (!(cand_ll >= ll)) {
      // No ascent direction left at machine precision.
      fit.converged = full_step < 1e-6;
      break;
    }
    const double delta = (cand - beta).cwiseAbs().maxCoeff();
    beta = cand;
    mu = cand_mu;
    ll = cand_ll;
    ++fit.iterations;
    fit.beta_history.push_back(beta);
    fit.log_likelihood_history.push_back(ll);
    if (delta < opt.tolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.estimate = beta;
  fit.log_likelihood = ll;

  // Information A = X'WX, meat B = sum (y - mu)^2 x x'.
  const VectorXd w = mu.array() * (1.0 - mu.array());
  const MatrixXd a = x.transpose() * w.asDiagonal() * x;
  const VectorXd r2 = (y - mu).array().square();
  const MatrixXd b = x.transpose() * r2.asDiagonal() * x;
  const Eigen::FullPivLU<MatrixXd> lu(a);
  MatrixXd a_inv;
  if (lu.isInvertible()) {
    a_inv = lu.inverse();
  } else {
    a_inv = MatrixXd::Constant(p, p, std::numeric_limits<double>::infinity());
  }
  const MatrixXd robust = a_inv * b * a_inv;
  fit.information_se.resize(p);
  fit.robust_se.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double vi = a_inv(j, j);
    const double vr = robust(j, j);
    fit.information_se(j) = (std::isfinite(vi) && vi >= 0.0) ? std::sqrt(vi) : std::numeric_limits<double>::infinity();
    fit.robust_se(j) = (std::isfinite(vr) && vr >= 0.0) ? std::sqrt(vr) : std::numeric_limits<double>::infinity();
  }
  fit.se = family == Family::logistic ? fit.information_se : fit.robust_se;

  fit.z.resize(p);
  fit.p_value.resize(p);
  fit.odds_ratio.resize(p);
  fit.ci_low.resize(p);
  fit.ci_high.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double est = beta(j);
    const double se = fit.se(j);
    if (se > 0.0 && std::isfinite(se)) {
      const WaldResult w_j = wald_test(est, se);
      fit.z(j) = w_j.z;
      fit.p_value(j) = w_j.p;
    } else {
      fit.z(j) = std::numeric_limits<double>::quiet_NaN();
      fit.p_value(j) = std::numeric_limits<double>::quiet_NaN();
    }
    fit.odds_ratio(j) = std::exp(est);
    fit.ci_low(j) = std::exp(est - kCiZ * se);
    fit.ci_high(j) = std::exp(est + kCiZ * se);
  }
  fit.separation = detect_separation(design, fit);
  return fit;
}

inline FitResult fit_logistic(const DesignMatrix& design, const FitOptions& opt = {}) {
  return fit_irls(design, Family::logistic, opt);
}

inline FitResult fit_fractional_logit(const DesignMatrix& design, const FitOptions& opt = {}) {
  return fit_irls(design, Family::fractional_logit, opt);
}

inline constexpr double kSeparationEstimate = 8.0;
inline constexpr double kSeparationSe = 50.0;
inline constexpr int kSeparationWindow = 10;
inline constexpr double kSeparationLlGain = 1e-10;

/// Flags a coefficient when |estimate| > 8, se > 50, or its magnitude grew at
/// each of the last 10 iterations while the log-likelihood gained <= 1e-10.
inline std::vector<bool> detect_separation(const DesignMatrix& design, const FitResult& fit) {
  const auto p = static_cast<std::size_t>(fit.estimate.size());
  std::vector<bool> flags(p, false);
  (void)design;
  const std::size_t h = fit.beta_history.size();
  for (std::size_t j = 0; j < p; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double est = fit.estimate(jj);
    const double se = j < static_cast<std::size_t>(fit.se.size()) ? fit.se(jj) : 0.0;
    bool flag = !std::isfinite(est) || std::abs(est) > kSeparationEstimate || !std::isfinite(se) || se > kSeparationSe;
    if (!flag && h > static_cast<std::size_t>(kSeparationWindow)) {
      bool growing = true;
      for (std::size_t k = h - kSeparationWindow; k < h && growing; ++k)
        growing = std::abs(fit.beta_history[k](jj)) > std::abs(fit.beta_history[k - 1](jj));
      const double gain =
          fit.log_likelihood_history[h - 1] - fit.log_likelihood_history[h - 1 - kSeparationWindow];
      flag = growing && gain <= kSeparationLlGain;
    }
    flags[j] = flag;
  }
  return flags;
}

inline double predict_mean(const FitResult& fit, const Eigen::RowVectorXd& row) {
  return sigmoid(row.dot(fit.estimate));
}

// ---------------------------------------------------------------------------
// Reporting helpers
// ---------------------------------------------------------------------------

struct OddsRatioRow {
  std::string term;
  double coef = 0.0;
  double odds_ratio = 0.0;
  double p_value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

inline std::vector<OddsRatioRow> odds_ratio_table(const FitResult& fit) {
  std::vector<OddsRatioRow> rows;
  for (Eigen::Index j = 0; j < fit.estimate.size(); ++j) {
    const auto jj = static_cast<std::size_t>(j);
    rows.push_back({jj < fit.columns.size() ? fit.columns[jj] : "b" + std::to_string(j), fit.estimate(j),
                    std::exp(fit.estimate(j)), fit.p_value(j), fit.ci_low(j), fit.ci_high(j)});
  }
  return rows;
}

inline std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);  // no "-0.000"
  return s;
}

/// Coefficient to 4 decimals, OR, p and CI bounds to 3.
inline std::string format_odds_ratio_table(std::span<const OddsRatioRow> rows) {
  std::string out = "term,coef,OR,p,ci_low,ci_high\n";
  for (const auto& r : rows) {
    out += r.term + "," + format_fixed(r.coef, 4) + "," + format_fixed(r.odds_ratio, 3) + "," +
           format_fixed(r.p_value, 3) + "," + format_fixed(r.ci_low, 3) + "," + format_fixed(r.ci_high, 3) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partial dependence
// ---------------------------------------------------------------------------

struct PdpCurve {
  Predictor predictor = Predictor::q_o;
  GripperType gripper = GripperType::rigid;
  std::vector<double> grid;
  std::vector<double> value;
};

/// Average predicted mean with the predictor pinned to each grid value and the
/// gripper factor set to `gripper` in every row.
inline PdpCurve partial_dependence(const FitResult& fit, std::span<const ModelRow> rows, Predictor predictor,
                                   GripperType gripper, std::span<const double> grid) {
  require(!rows.empty(), ErrorKind::domain, "partial dependence needs at least one row");
  require(fit.estimate.size() == kDesignColumns, ErrorKind::domain, "fit does not match the gripper design");
  PdpCurve c{predictor, gripper, std::vector<double>(grid.begin(), grid.end()), {}};
  for (double g : grid) {
    double acc = 0.0;
    for (ModelRow r : rows) {
      switch (predictor) {
        case Predictor::q_o: r.q_o = g; break;
        case Predictor::q_p: r.q_p = g; break;
        case Predictor::q_c: r.q_c = g; break;
      }
      acc += predict_mean(fit, design_row(r.q_o, r.q_p, r.q_c, gripper));
    }
    c.value.push_back(acc / static_cast<double>(rows.size()));
  }
  return c;
}

inline std::vector<double> linear_grid(double lo, double hi, int n) {
  require(n >= 2, ErrorKind::domain, "grid needs at least two points");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace grab::inference
