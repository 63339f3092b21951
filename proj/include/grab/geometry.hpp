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

// Coordinate chain, pose re-parameterisation and executable-pose filtering.
//
// Frames: pixel (u, v) -> camera (Xc, Yc, Zc) via the pinhole intrinsics, camera
// -> world via a rigid transform composed from the kinematic chain. Executable
// poses use the convention that the local +z axis of the orientation is the
// approach direction.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

#include "grab/core.hpp"

namespace grab::geometry {

inline constexpr double kRigidTolerance = 1e-9;
inline constexpr double kQuaternionInputTolerance = 1e-6;
inline constexpr std::size_t kTopCandidates = 8;
inline constexpr double kDefaultMinApproachDeg = 30.0;
inline constexpr double kDefaultGripperClearance = 0.02;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  static RigidTransform from_translation(const Vec3& t) { return {Mat3::Identity(), t}; }

  /// Left-to-right composition: (this * other)(p) == this(other(p)).
  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }

  RigidTransform inverse() const {
    const Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

  Eigen::Matrix4d homogeneous() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  bool is_valid(double tol = kRigidTolerance) const {
    const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= tol;
  }
};

struct KinematicChain {
  std::vector<RigidTransform> links;  // base -> 1 -> ... -> ee -> cam
};

struct Quaternion {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

  Mat3 to_rotation() const {
    const double n = norm();
    const double qx = x / n, qy = y / n, qz = z / n, qw = w / n;
    Mat3 r;
    r << 1 - 2 * (qy * qy + qz * qz), 2 * (qx * qy - qz * qw), 2 * (qx * qz + qy * qw),
        2 * (qx * qy + qz * qw), 1 - 2 * (qx * qx + qz * qz), 2 * (qy * qz - qx * qw),
        2 * (qx * qz - qy * qw), 2 * (qy * qz + qx * qw), 1 - 2 * (qx * qx + qy * qy);
    return r;
  }
};

struct ParallelGraspPose {
  Mat3 rotation = Mat3::Identity();  // camera frame
  Vec3 center = Vec3::Zero();        // camera frame, meters
  double width = 0.0;                // carried as metadata only
  double original_score = 0.0;
  double stable_score = 0.0;
};

struct SuctionPose {
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // outward surface normal
  double score = 0.0;
};

using GraspCandidate = std::variant<ParallelGraspPose, SuctionPose>;

struct ExecutablePose {
  Vec3 translation = Vec3::Zero();
  Quaternion orientation;
  double quality = 0.0;

  Vec3 approach() const { return orientation.to_rotation().col(2); }
};

/// Plane n . x = offset with unit normal n.
struct WorkbenchPlane {
  Vec3 normal = Vec3::UnitZ();
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.normalized().dot(p) - offset; }
};

inline Vec3 pixel_to_camera(const CameraIntrinsics& intr, double u, double v, double zc) {
  require(zc > 0.0 && std::isfinite(zc), ErrorKind::invalid_depth, "depth must be positive");
  require(intr.fx > 0.0 && intr.fy > 0.0, ErrorKind::domain, "focal lengths must be positive");
  return {(u - intr.cx) * zc / intr.fx, (v - intr.cy) * zc / intr.fy, zc};
}

inline RigidTransform compose_chain(const KinematicChain& chain) {
  require(!chain.links.empty(), ErrorKind::domain, "kinematic chain is empty");
  RigidTransform acc = chain.links.front();
  for (std::size_t i = 1; i < chain.links.size(); ++i) acc = acc * chain.links[i];
  return acc;
}

inline Vec3 camera_to_world(const RigidTransform& t_world_cam, const Vec3& p_cam) {
  return t_world_cam.apply(p_cam);
}

/// Shepperd's method: pivot on the largest of trace and the diagonal entries.
inline Quaternion rotation_to_quaternion(const Mat3& r) {
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(r.allFinite() && ortho <= kQuaternionInputTolerance &&
              std::abs(r.determinant() - 1.0) <= kQuaternionInputTolerance,
          ErrorKind::invalid_rotation, "matrix is not a proper rotation");

  const double trace = r.trace();
  Quaternion q;
  if (trace >= r(0, 0) && trace >= r(1, 1) && trace >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + trace);
    q.w = 0.25 * s;
    q.x = (r(2, 1) - r(1, 2)) / s;
    q.y = (r(0, 2) - r(2, 0)) / s;
    q.z = (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) >= r(1, 1) && r(0, 0) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2));
    q.w = (r(2, 1) - r(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (r(0, 1) + r(1, 0)) / s;
    q.z = (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) >= r(2, 2)) {
    const double s = 2.0 * std::sqrt(1.0 - r(0, 0) + r(1, 1) - r(2, 2));
    q.w = (r(0, 2) - r(2, 0)) / s;
    q.x = (r(0, 1) + r(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = 2.0 * std::sqrt(1.0 - r(0, 0) - r(1, 1) + r(2, 2));
    q.w = (r(1, 0) - r(0, 1)) / s;
    q.x = (r(0, 2) + r(2, 0)) / s;
    q.y = (r(1, 2) + r(2, 1)) / s;
    q.z = 0.25 * s;
  }

  const double n = q.norm();
  q = {q.x / n, q.y / n, q.z / n, q.w / n};

  // Double cover: w >= 0, and for w == 0 the first non-zero vector component is positive.
  bool flip = q.w < 0.0;
  if (q.w == 0.0) {
    for (double c : {q.x, q.y, q.z}) {
      if (c != 0.0) {
        flip = c < 0.0;
        break;
      }
    }
  }
  if (flip) q = {-q.x, -q.y, -q.z, -q.w};
  if (q.w == 0.0) q.w = 0.0;  // drop a negative zero
  return q;
}

inline Mat3 quaternion_to_rotation(const Quaternion& q) { return q.to_rotation(); }

/// original x (1 - stable), or zero for collision-prone grasps.
inline double final_grasp_score(double original, double stable, bool collision) {
  require(in_unit_interval(original) && in_unit_interval(stable), ErrorKind::domain,
          "grasp scores must lie in [0,1]");
  if (collision) return 0.0;
  return original * (1.0 - stable);
}

/// Rotation whose local z is `approach`; roll fixes local x to the projection
/// of world x (world y if x is parallel to the approach) onto the orthogonal plane.
inline Mat3 frame_from_approach(const Vec3& approach) {
  const double n = approach.norm();
  require(std::isfinite(n) && n > 1e-12, ErrorKind::invalid_pose, "approach direction is degenerate");
  const Vec3 z = approach / n;
  Vec3 ref = Vec3::UnitX();
  Vec3 x = ref - ref.dot(z) * z;
  if (x.norm() < 1e-6) {
    ref = Vec3::UnitY();
    x = ref - ref.dot(z) * z;
  }
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return r;
}

inline ExecutablePose grasp_to_executable(const ParallelGraspPose& g, const RigidTransform& t_world_cam) {
  require(g.rotation.allFinite() && g.center.allFinite(), ErrorKind::invalid_pose, "non-finite pose");
  require(g.width >= 0.0, ErrorKind::invalid_pose, "gripper width must be non-negative");
  ExecutablePose out;
  out.translation = camera_to_world(t_world_cam, g.center);
  out.orientation = rotation_to_quaternion(t_world_cam.rotation * g.rotation);
  out.quality = final_grasp_score(g.original_score, g.stable_score, false);
  return out;
}

inline ExecutablePose grasp_to_executable(const SuctionPose& s, const RigidTransform& t_world_cam) {
  require(s.point.allFinite(), ErrorKind::invalid_pose, "non-finite suction point");
  require(in_unit_interval(s.score), ErrorKind::domain, "suction score must lie in [0,1]");
  const Vec3 approach_world = -(t_world_cam.rotation * s.direction);
  ExecutablePose out;
  out.translation = camera_to_world(t_world_cam, s.point);
  out.orientation = rotation_to_quaternion(frame_from_approach(approach_world));
  out.quality = s.score;
  return out;
}

inline ExecutablePose grasp_to_executable(const GraspCandidate& g, const RigidTransform& t_world_cam) {
  return std::visit([&](const auto& pose) { return grasp_to_executable(pose, t_world_cam); }, g);
}

/// Angle in degrees between the approach axis and the plane: 90 = straight down the normal.
inline double approach_angle(const ExecutablePose& pose, const WorkbenchPlane& plane) {
  const Vec3 a = pose.approach().normalized();
  const Vec3 n = plane.normal.normalized();
  const double s = std::clamp(std::abs(a.dot(n)), 0.0, 1.0);
  return std::asin(s) * 180.0 / std::numbers::pi;
}

/// Top-8 by quality (stable on ties), then drop poses that approach too
/// shallowly or sit closer than `gripper_clearance` to the workbench.
inline std::vector<ExecutablePose> filter_poses(std::span<const ExecutablePose> candidates,
                                                const WorkbenchPlane& plane,
                                                double gripper_clearance = kDefaultGripperClearance,
                                                double min_angle_deg = kDefaultMinApproachDeg) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[a].quality > candidates[b].quality;
  });
  if (order.size() > kTopCandidates) order.resize(kTopCandidates);

  std::vector<ExecutablePose> kept;
  for (std::size_t idx : order) {
    const ExecutablePose& p = candidates[idx];
    if (approach_angle(p, plane) + 1e-9 < min_angle_deg) continue;
    if (plane.signed_distance(p.translation) < gripper_clearance) continue;
    kept.push_back(p);
  }
  return kept;
}

inline ExecutablePose pre_grasp_offset(const ExecutablePose& pose, double distance) {
  require(distance > 0.0 && std::isfinite(distance), ErrorKind::domain, "offset distance must be positive");
  ExecutablePose out = pose;
  out.translation = pose.translation - distance * pose.approach().normalized();
  return out;
}

}  // namespace grab::geometry
