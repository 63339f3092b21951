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

// Object-quality scoring from point clouds: coarse principal-axis alignment,
// point-to-point ICP refinement, and the density-aware chamfer distance whose
// two-axis average is the object score Q_O.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "grab/core.hpp"
#include "grab/geometry.hpp"
#include "grab/spatial_index.hpp"

namespace grab::deformation {

using geometry::RigidTransform;

struct PointCloud {
  std::vector<Vec3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct DcdParams {
  double alpha = 40.0;
};

struct IcpParams {
  int max_iterations = 50;
  double tolerance = 1e-6;  // meters of RMS improvement
};

struct AlignmentResult {
  RigidTransform transform;
  double rms_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // entry 0 is the residual at `init`
};

struct ObjectScoreInput {
  PointCloud pre_grasp;
  PointCloud deformed_x;
  PointCloud deformed_y;
};

struct ObjectScore {
  double dcd_x = 0.0;
  double dcd_y = 0.0;
  double q_o = 0.0;
  AlignmentResult alignment_x;
  AlignmentResult alignment_y;
};

inline constexpr std::size_t kDownsampleThreshold = 50'000;
inline constexpr double kDownsampleVoxel = 0.002;

inline void check_cloud(const PointCloud& c, const char* name) {
  require(!c.empty(), ErrorKind::domain, std::string(name) + " point cloud is empty");
}

inline PointCloud transformed(const PointCloud& c, const RigidTransform& t) {
  PointCloud out;
  out.points.reserve(c.size());
  for (const Vec3& p : c.points) out.points.push_back(t.apply(p));
  return out;
}

inline Neighbor nearest_neighbor(const Vec3& query, const PointCloud& cloud) {
  check_cloud(cloud, "search");
  return KdTree(cloud.points).nearest(query);
}

/// Reverse-match counts. `s2_hits[j]` is how many points of S1 pick S2[j] as
/// their nearest neighbour; `s1_hits[i]` is the symmetric count. Raw counts
/// may be zero; the weights used by the distance clamp them to at least 1.
struct DensityCounts {
  std::vector<std::size_t> s2_hits;
  std::vector<std::size_t> s1_hits;
  std::vector<Neighbor> s1_to_s2;  // nearest S2 point for each S1 point
  std::vector<Neighbor> s2_to_s1;

  static double weight(std::size_t hits) { return static_cast<double>(hits < 1 ? 1 : hits); }
};

inline DensityCounts density_counts(const PointCloud& s1, const PointCloud& s2) {
  check_cloud(s1, "first");
  check_cloud(s2, "second");
  const KdTree tree1(s1.points);
  const KdTree tree2(s2.points);

  DensityCounts dc;
  dc.s2_hits.assign(s2.size(), 0);
  dc.s1_hits.assign(s1.size(), 0);
  dc.s1_to_s2.reserve(s1.size());
  dc.s2_to_s1.reserve(s2.size());
  for (const Vec3& x : s1.points) {
    const Neighbor nb = tree2.nearest(x);
    ++dc.s2_hits[nb.index];
    dc.s1_to_s2.push_back(nb);
  }
  for (const Vec3& y : s2.points) {
    const Neighbor nb = tree1.nearest(y);
    ++dc.s1_hits[nb.index];
    dc.s2_to_s1.push_back(nb);
  }
  return dc;
}

/// Density-aware chamfer distance in [0,1]. Each directed term averages
/// 1 - exp(-alpha d) / n over the source cloud, n being the reverse-match
/// count of the matched point; the result is the mean of both directions.
inline double dcd(const PointCloud& s1, const PointCloud& s2, const DcdParams& params = {}) {
  require(params.alpha > 0.0 && std::isfinite(params.alpha), ErrorKind::domain, "alpha must be positive");
  const DensityCounts dc = density_counts(s1, s2);

  double sum1 = 0.0;
  for (const Neighbor& nb : dc.s1_to_s2)
    sum1 += 1.0 - std::exp(-params.alpha * nb.distance) / DensityCounts::weight(dc.s2_hits[nb.index]);
  double sum2 = 0.0;
  for (const Neighbor& nb : dc.s2_to_s1)
    sum2 += 1.0 - std::exp(-params.alpha * nb.distance) / DensityCounts::weight(dc.s1_hits[nb.index]);

  const double term1 = sum1 / static_cast<double>(s1.size());
  const double term2 = sum2 / static_cast<double>(s2.size());
  return 0.5 * (term1 + term2);
}

namespace detail {

struct PrincipalFrame {
  Vec3 centroid;
  Mat3 axes;  // columns: major, middle, minor (right-handed)
};

inline PrincipalFrame principal_frame(const PointCloud& c) {
  require(c.size() >= 4, ErrorKind::degenerate_geometry, "principal axes need at least 4 points");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : c.points) centroid += p;
  centroid /= static_cast<double>(c.size());

  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : c.points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(c.size());

  const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 values = eig.eigenvalues();  // ascending
  require(values(2) > 0.0 && values(0) > 1e-12 * values(2), ErrorKind::degenerate_geometry,
          "covariance is rank deficient (coplanar or collinear cloud)");

  Vec3 major = eig.eigenvectors().col(2);
  Vec3 middle = eig.eigenvectors().col(1);
  auto third_moment = [&](const Vec3& axis) {
    double m = 0.0;
    for (const Vec3& p : c.points) {
      const double s = (p - centroid).dot(axis);
      m += s * s * s;
    }
    return m;
  };
  if (third_moment(major) < 0.0) major = -major;
  if (third_moment(middle) < 0.0) middle = -middle;

  PrincipalFrame f;
  f.centroid = centroid;
  f.axes.col(0) = major;
  f.axes.col(1) = middle;
  f.axes.col(2) = major.cross(middle);
  return f;
}

/// Least-squares rigid map src[i] -> dst[i] (Kabsch, reflection-corrected).
inline RigidTransform fit_rigid(std::span<const Vec3> src, std::span<const Vec3> dst) {
  const auto n = static_cast<double>(src.size());
  Vec3 cs = Vec3::Zero();
  Vec3 cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= n;
  cd /= n;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();

  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  d(2, 2) = (v * u.transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  RigidTransform t;
  t.rotation = v * d * u.transpose();
  t.translation = cd - t.rotation * cs;
  return t;
}

}  // namespace detail

/// Maps the source centroid and principal axes onto the target's.
inline RigidTransform pca_align(const PointCloud& source, const PointCloud& target) {
  const auto fs = detail::principal_frame(source);
  const auto ft = detail::principal_frame(target);
  RigidTransform t;
  t.rotation = ft.axes * fs.axes.transpose();
  t.translation = ft.centroid - t.rotation * fs.centroid;
  return t;
}

/// Keeps the first point (input order) falling in each voxel.
inline PointCloud voxel_downsample(const PointCloud& c, double voxel) {
  require(voxel > 0.0, ErrorKind::domain, "voxel size must be positive");
  struct KeyHash {
    std::size_t operator()(const Eigen::Vector3<std::int64_t>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (int i = 0; i < 3; ++i) h = (h ^ static_cast<std::size_t>(k[i])) * 1099511628211ull;
      return h;
    }
  };
  struct KeyEq {
    bool operator()(const Eigen::Vector3<std::int64_t>& a, const Eigen::Vector3<std::int64_t>& b) const {
      return a == b;
    }
  };
  std::unordered_map<Eigen::Vector3<std::int64_t>, bool, KeyHash, KeyEq> seen;
  PointCloud out;
  for (const Vec3& p : c.points) {
    const Eigen::Vector3<std::int64_t> key = (p / voxel).array().floor().cast<std::int64_t>();
    if (seen.emplace(key, true).second) out.points.push_back(p);
  }
  return out;
}

/// Point-to-point ICP. A step that would raise the RMS residual is rejected,
/// so `residual_history` is non-increasing by construction.
inline AlignmentResult icp(const PointCloud& source, const PointCloud& target,
                           const RigidTransform& init = RigidTransform::identity(),
                           const IcpParams& params = {}) {
  check_cloud(source, "source");
  check_cloud(target, "target");
  require(params.max_iterations >= 0, ErrorKind::domain, "max_iterations must be non-negative");

  const KdTree tree(target.points);
  std::vector<Vec3> moved(source.size());
  std::vector<Vec3> matched(source.size());

  auto correspond = [&](const RigidTransform& t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < source.size(); ++i) {
      moved[i] = t.apply(source.points[i]);
      const Neighbor nb = tree.nearest(moved[i]);
      matched[i] = target.points[nb.index];
      sum += nb.distance * nb.distance;
    }
    return std::sqrt(sum / static_cast<double>(source.size()));
  };

  AlignmentResult res;
  res.transform = init;
  res.rms_residual = correspond(init);
  res.residual_history.push_back(res.rms_residual);
  if (res.rms_residual == 0.0) {
    res.converged = true;
    return res;
  }

  while (res.iterations < params.max_iterations) {
    const RigidTransform step = detail::fit_rigid(moved, matched);
    const RigidTransform candidate = step * res.transform;
    const std::vector<Vec3> saved_moved = moved;
    const std::vector<Vec3> saved_matched = matched;
    const double rms = correspond(candidate);
    if (!(rms <= res.rms_residual)) {
      moved = saved_moved;
      matched = saved_matched;
      res.converged = true;  // no further descent available
      break;
    }
    ++res.iterations;
    const double improvement = res.rms_residual - rms;
    res.transform = candidate;
    res.rms_residual = rms;
    res.residual_history.push_back(rms);
    if (improvement < params.tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

/// Aligns `deformed` onto `reference` (principal axes, then ICP) and returns the
/// aligned cloud. Clouds above the down-sampling threshold are voxel-thinned
/// for the alignment only.
inline std::pair<PointCloud, AlignmentResult> align_to(const PointCloud& deformed, const PointCloud& reference,
                                                       const IcpParams& icp_params = {}) {
  const bool thin_src = deformed.size() > kDownsampleThreshold;
  const bool thin_dst = reference.size() > kDownsampleThreshold;
  const PointCloud src = thin_src ? voxel_downsample(deformed, kDownsampleVoxel) : deformed;
  const PointCloud dst = thin_dst ? voxel_downsample(reference, kDownsampleVoxel) : reference;
  const RigidTransform coarse = pca_align(src, dst);
  AlignmentResult res = icp(src, dst, coarse, icp_params);
  return {transformed(deformed, res.transform), std::move(res)};
}

inline ObjectScore object_score(const ObjectScoreInput& in, const DcdParams& params = {},
                                const IcpParams& icp_params = {}) {
  check_cloud(in.pre_grasp, "pre-grasp");
  check_cloud(in.deformed_x, "x-deformed");
  check_cloud(in.deformed_y, "y-deformed");

  ObjectScore out;
  auto [aligned_x, res_x] = align_to(in.deformed_x, in.pre_grasp, icp_params);
  auto [aligned_y, res_y] = align_to(in.deformed_y, in.pre_grasp, icp_params);
  out.dcd_x = dcd(aligned_x, in.pre_grasp, params);
  out.dcd_y = dcd(aligned_y, in.pre_grasp, params);
  out.q_o = (out.dcd_x + out.dcd_y) / 2.0;
  out.alignment_x = std::move(res_x);
  out.alignment_y = std::move(res_y);
  return out;
}

}  // namespace grab::deformation
