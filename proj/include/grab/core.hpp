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

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace grab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ErrorKind {
  domain,
  invalid_depth,
  invalid_rotation,
  invalid_pose,
  degenerate_geometry,
  degenerate_window,
  coverage,
  rank,
  parse,
  version,
  format,
  unsupported_format,
  length,
  data,
  io,
};

inline std::string_view to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_depth: return "invalid-depth";
    case ErrorKind::invalid_rotation: return "invalid-rotation";
    case ErrorKind::invalid_pose: return "invalid-pose";
    case ErrorKind::degenerate_geometry: return "degenerate-geometry";
    case ErrorKind::degenerate_window: return "degenerate-window";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::rank: return "rank";
    case ErrorKind::parse: return "parse";
    case ErrorKind::version: return "version";
    case ErrorKind::format: return "format";
    case ErrorKind::unsupported_format: return "unsupported-format";
    case ErrorKind::length: return "length";
    case ErrorKind::data: return "data";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the toolkit carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

// ---------------------------------------------------------------------------
// Closed enumerations shared by scoring, inference, reporting and the harness.
// ---------------------------------------------------------------------------

enum class GripperType : std::uint8_t { rigid, finray, suction };
enum class ObjectCategory : std::uint8_t {
  plastic_bag,
  plastic_container,
  plastic_plate,
  plastic_bottle,
  lpb,
  mesh_bag,
  tin_can,
};
enum class TrialOutcome : std::uint8_t { success, dropped_transit, fail };
enum class FailureMode : std::uint8_t { CL, CLS, SL, OP, WGP, EXEC, none };

inline constexpr std::array kGrippers{GripperType::rigid, GripperType::finray, GripperType::suction};
inline constexpr std::array kCategories{
    ObjectCategory::plastic_bag,    ObjectCategory::plastic_container, ObjectCategory::plastic_plate,
    ObjectCategory::plastic_bottle, ObjectCategory::lpb,               ObjectCategory::mesh_bag,
    ObjectCategory::tin_can,
};
inline constexpr std::array kFailureModes{FailureMode::CL,  FailureMode::CLS, FailureMode::SL,
                                          FailureMode::OP,  FailureMode::WGP, FailureMode::EXEC};

inline std::string_view to_string(GripperType g) {
  switch (g) {
    case GripperType::rigid: return "rigid";
    case GripperType::finray: return "finray";
    case GripperType::suction: return "suction";
  }
  return "?";
}

inline std::string_view to_string(ObjectCategory c) {
  switch (c) {
    case ObjectCategory::plastic_bag: return "plastic_bag";
    case ObjectCategory::plastic_container: return "plastic_container";
    case ObjectCategory::plastic_plate: return "plastic_plate";
    case ObjectCategory::plastic_bottle: return "plastic_bottle";
    case ObjectCategory::lpb: return "lpb";
    case ObjectCategory::mesh_bag: return "mesh_bag";
    case ObjectCategory::tin_can: return "tin_can";
  }
  return "?";
}

inline std::string_view to_string(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::success: return "success";
    case TrialOutcome::dropped_transit: return "dropped_transit";
    case TrialOutcome::fail: return "fail";
  }
  return "?";
}

inline std::string_view to_string(FailureMode f) {
  switch (f) {
    case FailureMode::CL: return "CL";
    case FailureMode::CLS: return "CLS";
    case FailureMode::SL: return "SL";
    case FailureMode::OP: return "OP";
    case FailureMode::WGP: return "WGP";
    case FailureMode::EXEC: return "EXEC";
    case FailureMode::none: return "none";
  }
  return "?";
}

namespace detail {
template <typename Enum, std::size_t N>
std::optional<Enum> parse_enum(std::string_view s, const std::array<Enum, N>& values) {
  for (Enum v : values)
    if (to_string(v) == s) return v;
  return std::nullopt;
}
}  // namespace detail

inline std::optional<GripperType> parse_gripper(std::string_view s) {
  return detail::parse_enum(s, kGrippers);
}

inline std::optional<ObjectCategory> parse_category(std::string_view s) {
  return detail::parse_enum(s, kCategories);
}

inline std::optional<TrialOutcome> parse_outcome(std::string_view s) {
  return detail::parse_enum(
      s, std::array{TrialOutcome::success, TrialOutcome::dropped_transit, TrialOutcome::fail});
}

inline std::optional<FailureMode> parse_failure(std::string_view s) {
  return detail::parse_enum(s, std::array{FailureMode::CL, FailureMode::CLS, FailureMode::SL,
                                          FailureMode::OP, FailureMode::WGP, FailureMode::EXEC,
                                          FailureMode::none});
}

inline bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace grab
