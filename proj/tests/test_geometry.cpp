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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "grab/geometry.hpp"
#include "oracles.hpp"

using namespace grab;
using namespace grab::geometry;

namespace {

RigidTransform random_transform(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {oracle::random_rotation(rng, std::numbers::pi), Vec3(u(rng), u(rng), u(rng))};
}

Mat3 rot_z(double deg) { return Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, Vec3::UnitZ()).toRotationMatrix(); }

ExecutablePose pose_with_approach(const Vec3& approach, const Vec3& t, double quality) {
  return {t, rotation_to_quaternion(frame_from_approach(approach)), quality};
}

}  // namespace

TEST(PixelToCamera, PrincipalPointRay) {
  const CameraIntrinsics k{600, 600, 320, 240};
  EXPECT_TRUE(pixel_to_camera(k, 320, 240, 1.0).isApprox(Vec3(0, 0, 1.0)));
  EXPECT_TRUE(pixel_to_camera(k, 920, 240, 1.0).isApprox(Vec3(1.0, 0, 1.0)));
}

TEST(PixelToCamera, AnisotropicFocal) {
  const CameraIntrinsics k{600, 500, 300, 200};
  const Vec3 p = pixel_to_camera(k, 450, 450, 2.0);
  EXPECT_NEAR(p.x(), 0.5, 1e-12);
  EXPECT_NEAR(p.y(), 1.0, 1e-12);
  EXPECT_NEAR(p.z(), 2.0, 1e-12);
}

TEST(PixelToCamera, RejectsNonPositiveDepth) {
  const CameraIntrinsics k{600, 600, 320, 240};
  for (double z : {0.0, -1.0}) {
    try {
      pixel_to_camera(k, 0, 0, z);
      FAIL() << "expected invalid_depth";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_depth);
    }
  }
}

TEST(ComposeChain, IdentityAndInverse) {
  const RigidTransform id = compose_chain({{RigidTransform::identity(), RigidTransform::identity()}});
  EXPECT_TRUE(id.homogeneous().isApprox(Eigen::Matrix4d::Identity()));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = random_transform(rng);
    const RigidTransform c = compose_chain({{t, t.inverse()}});
    EXPECT_LT((c.homogeneous() - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ComposeChain, MatchesHomogeneousProduct) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const RigidTransform a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    const Eigen::Matrix4d direct = a.homogeneous() * b.homogeneous() * c.homogeneous();
    EXPECT_LT((compose_chain({{a, b, c}}).homogeneous() - direct).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ComposeChain, EmptyIsDomainError) {
  EXPECT_THROW(compose_chain({}), Error);
}

TEST(CameraToWorld, Examples) {
  EXPECT_TRUE(camera_to_world(RigidTransform::identity(), Vec3(1, 2, 3)).isApprox(Vec3(1, 2, 3)));
  EXPECT_TRUE(camera_to_world(RigidTransform::from_translation({0.1, 0, 0}), Vec3::Zero()).isApprox(Vec3(0.1, 0, 0)));
  const Vec3 p = camera_to_world({rot_z(90), Vec3::Zero()}, Vec3(1, 0, 0));
  EXPECT_LT((p - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(Quaternion, KnownCases) {
  const Quaternion q = rotation_to_quaternion(Mat3::Identity());
  EXPECT_EQ(q.x, 0.0);
  EXPECT_EQ(q.y, 0.0);
  EXPECT_EQ(q.z, 0.0);
  EXPECT_EQ(q.w, 1.0);
  const Quaternion z180 = rotation_to_quaternion(Eigen::Vector3d(-1, -1, 1).asDiagonal());
  EXPECT_NEAR(z180.x, 0.0, 1e-15);
  EXPECT_NEAR(z180.y, 0.0, 1e-15);
  EXPECT_NEAR(z180.z, 1.0, 1e-15);
  EXPECT_NEAR(z180.w, 0.0, 1e-15);
}

TEST(Quaternion, RoundTripAndCanonicalSign) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = oracle::random_rotation(rng, std::numbers::pi);
    const Quaternion q = rotation_to_quaternion(r);
    EXPECT_NEAR(q.norm(), 1.0, 1e-12);
    EXPECT_GE(q.w, 0.0);
    EXPECT_LT((quaternion_to_rotation(q) - r).cwiseAbs().maxCoeff(), 1e-9);
    // independent check against Eigen's conversion, up to the double cover
    Eigen::Quaterniond e(r);
    const double s = e.w() < 0 ? -1.0 : 1.0;
    EXPECT_NEAR(q.x, s * e.x(), 1e-9);
    EXPECT_NEAR(q.w, s * e.w(), 1e-9);
  }
}

TEST(Quaternion, RejectsNonRotation) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = 1.1;
  EXPECT_THROW(rotation_to_quaternion(m), Error);
  EXPECT_THROW(rotation_to_quaternion(Eigen::Vector3d(1, 1, -1).asDiagonal()), Error);  // reflection
  try {
    rotation_to_quaternion(2.0 * Mat3::Identity());
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_rotation);
  }
}

TEST(FinalGraspScore, Branches) {
  EXPECT_DOUBLE_EQ(final_grasp_score(0.8, 0.25, false), 0.6);
  EXPECT_EQ(final_grasp_score(0.9, 0.3, true), 0.0);
  EXPECT_EQ(final_grasp_score(1.0, 0.0, false), 1.0);
  EXPECT_THROW(final_grasp_score(1.2, 0.0, false), Error);
  EXPECT_THROW(final_grasp_score(0.5, -0.1, false), Error);
}

TEST(GraspToExecutable, ParallelIdentity) {
  ParallelGraspPose g;
  g.center = {0, 0, 0.5};
  g.original_score = 0.8;
  g.stable_score = 0.25;
  const ExecutablePose p = grasp_to_executable(g, RigidTransform::identity());
  EXPECT_TRUE(p.translation.isApprox(Vec3(0, 0, 0.5)));
  EXPECT_EQ(p.orientation.w, 1.0);
  EXPECT_EQ(p.orientation.x, 0.0);
  EXPECT_DOUBLE_EQ(p.quality, 0.6);
}

TEST(GraspToExecutable, SuctionApproachesAgainstNormal) {
  const SuctionPose s{{0, 0, 0.3}, {0, 0, 1}, 0.7};
  const ExecutablePose p = grasp_to_executable(GraspCandidate{s}, RigidTransform::identity());
  EXPECT_LT((p.orientation.to_rotation().col(2) - Vec3(0, 0, -1)).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(p.quality, 0.7);
}

TEST(GraspToExecutable, TranslationMatchesCameraToWorld) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const RigidTransform t = random_transform(rng);
    ParallelGraspPose g;
    g.rotation = oracle::random_rotation(rng, std::numbers::pi);
    g.center = {0.1 * i, -0.2, 0.4};
    const ExecutablePose p = grasp_to_executable(g, t);
    EXPECT_LT((p.translation - camera_to_world(t, g.center)).norm(), 1e-12);
    EXPECT_LT((p.orientation.to_rotation() - t.rotation * g.rotation).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(GraspToExecutable, DegenerateSuctionDirection) {
  const SuctionPose s{{0, 0, 0.3}, Vec3::Zero(), 0.5};
  try {
    grasp_to_executable(s, RigidTransform::identity());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_pose);
  }
}

TEST(FrameFromApproach, RollConvention) {
  const Mat3 r = frame_from_approach({0, 0, -1});
  EXPECT_LT((r.col(0) - Vec3::UnitX()).norm(), 1e-12);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  const Mat3 side = frame_from_approach({1, 0, 0});  // world x parallel: fall back to world y
  EXPECT_LT((side.col(0) - Vec3::UnitY()).norm(), 1e-12);
}

TEST(ApproachAngle, Examples) {
  const WorkbenchPlane plane;
  EXPECT_NEAR(approach_angle(pose_with_approach({0, 0, -1}, Vec3::Zero(), 1), plane), 90.0, 1e-9);
  EXPECT_NEAR(approach_angle(pose_with_approach({1, 0, 0}, Vec3::Zero(), 1), plane), 0.0, 1e-9);
  EXPECT_NEAR(approach_angle(pose_with_approach(Vec3(1, 0, -1) / std::sqrt(2.0), Vec3::Zero(), 1), plane), 45.0,
              1e-9);
}

TEST(FilterPoses, TopEightQualityDescending) {
  std::vector<ExecutablePose> c;
  for (int i = 0; i < 10; ++i) c.push_back(pose_with_approach({0, 0, -1}, {0, 0, 0.2}, 0.05 * (i + 1)));
  const auto kept = filter_poses(c, WorkbenchPlane{});
  ASSERT_EQ(kept.size(), 8u);
  for (std::size_t i = 1; i < kept.size(); ++i) EXPECT_GE(kept[i - 1].quality, kept[i].quality);
  EXPECT_DOUBLE_EQ(kept.front().quality, 0.5);
}

TEST(FilterPoses, ShallowApproachRemoved) {
  const double a = 20.0 * std::numbers::pi / 180.0;
  std::vector<ExecutablePose> c{pose_with_approach({std::cos(a), 0, -std::sin(a)}, {0, 0, 0.2}, 0.9)};
  EXPECT_TRUE(filter_poses(c, WorkbenchPlane{}, 0.02, 30.0).empty());
  EXPECT_EQ(filter_poses(c, WorkbenchPlane{}, 0.02, 15.0).size(), 1u);
}

TEST(FilterPoses, ClearanceAndStableTies) {
  std::vector<ExecutablePose> c;
  for (int i = 0; i < 4; ++i) c.push_back(pose_with_approach({0, 0, -1}, {0.01 * i, 0, 0.2}, 0.5));
  c.push_back(pose_with_approach({0, 0, -1}, {0, 0, 0.01}, 0.99));  // below clearance
  const auto kept = filter_poses(c, WorkbenchPlane{});
  ASSERT_EQ(kept.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(kept[static_cast<std::size_t>(i)].translation.x(), 0.01 * i);
}

TEST(PreGraspOffset, BacksOffAlongApproach) {
  const ExecutablePose p = pose_with_approach({0, 0, -1}, {0, 0, 0.2}, 1);
  const ExecutablePose pre = pre_grasp_offset(p, 0.1);
  EXPECT_LT((pre.translation - Vec3(0, 0, 0.3)).norm(), 1e-12);
  EXPECT_THROW(pre_grasp_offset(p, 0.0), Error);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    ExecutablePose q{Vec3(0.1, 0.2, 0.3), rotation_to_quaternion(oracle::random_rotation(rng, 3.0)), 0.5};
    const ExecutablePose back = pre_grasp_offset(q, 0.07);
    EXPECT_LT((back.translation + 0.07 * back.approach() - q.translation).norm(), 1e-12);
  }
}
