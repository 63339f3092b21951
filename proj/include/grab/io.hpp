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

// File formats: JSONL trial logs, PLY ascii / XYZ point clouds, 16-bit depth
// and 8-bit mask PGMs, JSON pose lists.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grab/core.hpp"
#include "grab/deformation.hpp"
#include "grab/geometry.hpp"
#include "grab/scene.hpp"
#include "grab/scoring.hpp"

namespace grab::io {

using nlohmann::json;
using scoring::TrialRecord;

inline constexpr int kSchemaVersion = 1;

struct TrialLog {
  int schema_version = kSchemaVersion;
  std::optional<std::uint64_t> seed;  // set for synthetic logs
  std::vector<TrialRecord> records;
};

namespace detail {

inline std::string read_all(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(os), ErrorKind::io, "cannot write " + path.string());
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  os.flush();
  require(static_cast<bool>(os), ErrorKind::io, "failed writing " + path.string());
}

[[noreturn]] inline void fail_at(std::size_t line, ErrorKind kind, const std::string& what) {
  throw Error(kind, "line " + std::to_string(line) + ": " + what);
}

inline const std::array<std::string_view, 14>& known_fields() {
  static const std::array<std::string_view, 14> k{"experiment_level", "scene_id", "trial_index", "gripper",
                                                  "category",         "object_id", "q_o",        "q_p",
                                                  "q_c",              "clutter",  "outcome",    "failure",
                                                  "timeline",         "cycle_time_s"};
  return k;
}

inline bool is_known(const std::string& key) {
  for (auto k : known_fields())
    if (k == key) return true;
  return false;
}

template <typename T>
T field(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) fail_at(line, ErrorKind::parse, std::string("missing field ") + key);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail_at(line, ErrorKind::parse, std::string("field ") + key + " has the wrong type");
  }
}

inline double number(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) fail_at(line, ErrorKind::parse, std::string("missing field ") + key);
  if (!it->is_number()) fail_at(line, ErrorKind::parse, std::string("field ") + key + " must be a number");
  return it->get<double>();
}

}  // namespace detail

inline TrialRecord record_from_json(const json& j, std::size_t line) {
  using detail::fail_at;
  if (!j.is_object()) fail_at(line, ErrorKind::parse, "record must be a JSON object");
  TrialRecord r;
  r.experiment_level = detail::field<int>(j, "experiment_level", line);
  r.scene_id = detail::field<std::string>(j, "scene_id", line);
  r.trial_index = detail::field<int>(j, "trial_index", line);
  r.object_id = detail::field<std::string>(j, "object_id", line);

  const auto g = parse_gripper(detail::field<std::string>(j, "gripper", line));
  if (!g) fail_at(line, ErrorKind::parse, "unknown gripper");
  r.gripper = *g;
  const auto c = parse_category(detail::field<std::string>(j, "category", line));
  if (!c) fail_at(line, ErrorKind::parse, "unknown category");
  r.category = *c;
  const auto o = parse_outcome(detail::field<std::string>(j, "outcome", line));
  if (!o) fail_at(line, ErrorKind::parse, "unknown outcome");
  r.outcome = *o;
  const auto f = parse_failure(detail::field<std::string>(j, "failure", line));
  if (!f) fail_at(line, ErrorKind::parse, "unknown failure mode");
  r.failure = *f;

  r.q_o = detail::number(j, "q_o", line);
  r.q_p = detail::number(j, "q_p", line);

  if (auto it = j.find("clutter"); it != j.end() && !it->is_null()) {
    scene::ClutterState s;
    s.n_initial = detail::field<int>(*it, "n_initial", line);
    s.n_before = detail::field<int>(*it, "n_before", line);
    s.o_initial = detail::number(*it, "o_initial", line);
    s.o_before = detail::number(*it, "o_before", line);
    r.clutter = s;
  }
  if (auto it = j.find("q_c"); it != j.end() && !it->is_null()) {
    r.q_c = detail::number(j, "q_c", line);
  } else if (r.clutter) {
    try {
      r.q_c = scene::clutter_score(*r.clutter);
    } catch (const Error& e) {
      fail_at(line, e.kind(), e.what());
    }
  } else {
    r.q_c = 0.0;
  }
  if (auto it = j.find("timeline"); it != j.end() && !it->is_null())
    r.timeline = scoring::HoldTimeline{detail::number(*it, "t1", line), detail::number(*it, "t2", line),
                                       detail::number(*it, "t3", line)};
  if (auto it = j.find("cycle_time_s"); it != j.end() && !it->is_null())
    r.cycle_time_s = detail::number(j, "cycle_time_s", line);

  json extra = json::object();
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!detail::is_known(it.key())) extra[it.key()] = it.value();
  if (!extra.empty()) r.extra_json = extra.dump();

  if (auto err = scoring::check_record(r)) fail_at(line, ErrorKind::domain, *err);
  return r;
}

inline json record_to_json(const TrialRecord& r) {
  json j;  // keys come out sorted, so the serialisation is canonical
  j["experiment_level"] = r.experiment_level;
  j["scene_id"] = r.scene_id;
  j["trial_index"] = r.trial_index;
  j["gripper"] = std::string(to_string(r.gripper));
  j["category"] = std::string(to_string(r.category));
  j["object_id"] = r.object_id;
  j["q_o"] = r.q_o;
  j["q_p"] = r.q_p;
  j["q_c"] = r.q_c;
  if (r.clutter)
    j["clutter"] = {{"n_initial", r.clutter->n_initial},
                    {"n_before", r.clutter->n_before},
                    {"o_initial", r.clutter->o_initial},
                    {"o_before", r.clutter->o_before}};
  j["outcome"] = std::string(to_string(r.outcome));
  j["failure"] = std::string(to_string(r.failure));
  if (r.timeline) j["timeline"] = {{"t1", r.timeline->t1}, {"t2", r.timeline->t2}, {"t3", r.timeline->t3}};
  if (r.cycle_time_s) j["cycle_time_s"] = *r.cycle_time_s;
  if (!r.extra_json.empty()) {
    const json extra = json::parse(r.extra_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  }
  return j;
}

inline TrialLog parse_trial_log(const std::string& text) {
  TrialLog log;
  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      detail::fail_at(n, ErrorKind::parse, std::string("malformed JSON: ") + e.what());
    }
    if (!header) {
      if (!j.is_object() || !j.contains("schema_version"))
        detail::fail_at(n, ErrorKind::version, "first line must be a header with schema_version");
      const json& v = j["schema_version"];
      if (!v.is_number_integer() || v.get<int>() != kSchemaVersion)
        detail::fail_at(n, ErrorKind::version,
                        "unsupported schema_version " + v.dump() + " (expected " + std::to_string(kSchemaVersion) + ")");
      if (auto s = j.find("seed"); s != j.end() && !s->is_null()) {
        if (!s->is_number_unsigned()) detail::fail_at(n, ErrorKind::parse, "seed must be a non-negative integer");
        log.seed = s->get<std::uint64_t>();
      }
      header = true;
      continue;
    }
    log.records.push_back(record_from_json(j, n));
  }
  require(header, ErrorKind::version, "trial log has no header line");
  return log;
}

inline TrialLog read_trial_log(const std::filesystem::path& path) { return parse_trial_log(detail::read_all(path)); }

inline std::string format_trial_log(const TrialLog& log) {
  json header = {{"schema_version", log.schema_version}};
  if (log.seed) header["seed"] = *log.seed;
  std::string out = header.dump() + "\n";
  for (const auto& r : log.records) out += record_to_json(r).dump() + "\n";
  return out;
}

inline void write_trial_log(const TrialLog& log, const std::filesystem::path& path) {
  detail::write_all(path, format_trial_log(log));
}

// ---------------------------------------------------------------------------
// Point clouds
// ---------------------------------------------------------------------------

namespace detail {

inline Vec3 checked_point(double x, double y, double z, std::size_t line) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
    fail_at(line, ErrorKind::data, "non-finite coordinate");
  return {x, y, z};
}

inline double parse_double(const std::string& tok, std::size_t line) {
  // strtod accepts "nan"/"inf", which are then rejected as data errors
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') fail_at(line, ErrorKind::parse, "bad number '" + tok + "'");
  return v;
}

inline deformation::PointCloud parse_ply(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  std::size_t vertex_count = 0;
  bool in_vertex = false;
  std::vector<std::string> props;
  bool ascii = false;
  while (std::getline(is, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (n == 1) {
      if (kw != "ply") fail_at(n, ErrorKind::format, "missing ply magic");
      continue;
    }
    if (kw == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian" || fmt == "binary_big_endian")
        throw Error(ErrorKind::unsupported_format, "binary PLY is not supported");
      if (fmt != "ascii") fail_at(n, ErrorKind::format, "unknown PLY format " + fmt);
      ascii = true;
    } else if (kw == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      in_vertex = name == "vertex";
      if (in_vertex) vertex_count = count;
    } else if (kw == "property") {
      if (in_vertex) {
        std::string type, name;
        ls >> type;
        if (type == "list") fail_at(n, ErrorKind::format, "list properties on vertices are not supported");
        ls >> name;
        props.push_back(name);
      }
    } else if (kw == "end_header") {
      break;
    }
  }
  if (!ascii) fail_at(n, ErrorKind::format, "PLY header has no format line");
  auto idx = [&](const char* name) -> std::size_t {
    for (std::size_t i = 0; i < props.size(); ++i)
      if (props[i] == name) return i;
    throw Error(ErrorKind::format, std::string("PLY vertex element lacks property ") + name);
  };
  deformation::PointCloud cloud;
  if (vertex_count == 0) return cloud;
  const std::size_t ix = idx("x"), iy = idx("y"), iz = idx("z");
  cloud.points.reserve(vertex_count);
  while (cloud.points.size() < vertex_count && std::getline(is, line)) {
    ++n;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < props.size()) fail_at(n, ErrorKind::parse, "vertex line has too few values");
    cloud.points.push_back(
        checked_point(parse_double(tok[ix], n), parse_double(tok[iy], n), parse_double(tok[iz], n), n));
  }
  if (cloud.points.size() != vertex_count)
    throw Error(ErrorKind::length, "PLY declares " + std::to_string(vertex_count) + " vertices, found " +
                                       std::to_string(cloud.points.size()));
  return cloud;
}

inline deformation::PointCloud parse_xyz(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  deformation::PointCloud cloud;
  while (std::getline(is, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() < 3) fail_at(n, ErrorKind::parse, "expected x y z");
    cloud.points.push_back(
        checked_point(parse_double(tok[0], n), parse_double(tok[1], n), parse_double(tok[2], n), n));
  }
  return cloud;
}

}  // namespace detail

inline deformation::PointCloud parse_point_cloud(const std::string& text) {
  if (text.rfind("ply", 0) == 0) return detail::parse_ply(text);
  return detail::parse_xyz(text);
}

/// PLY is recognised by its magic, anything else is read as XYZ text.
inline deformation::PointCloud read_point_cloud(const std::filesystem::path& path) {
  return parse_point_cloud(detail::read_all(path));
}

inline std::string format_xyz(const deformation::PointCloud& c) {
  std::string out;
  char buf[96];
  for (const auto& p : c.points) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
    out += buf;
  }
  return out;
}

inline std::string format_ply(const deformation::PointCloud& c) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(c.points.size()) +
                    "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  return out + format_xyz(c);
}

// ---------------------------------------------------------------------------
// PGM
// ---------------------------------------------------------------------------

namespace detail {

struct PgmHeader {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::size_t data_offset = 0;
};

inline PgmHeader parse_pgm_header(const std::string& bytes) {
  PgmHeader h;
  std::size_t pos = 0;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> int {
    skip_space();
    const std::size_t start = pos;
    long v = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000) throw Error(ErrorKind::format, "PGM header value too large");
      ++pos;
    }
    require(pos > start, ErrorKind::format, "malformed PGM header");
    return static_cast<int>(v);
  };
  require(bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5', ErrorKind::format, "not a binary PGM (P5)");
  pos = 2;
  h.width = read_int();
  h.height = read_int();
  h.maxval = read_int();
  require(h.width > 0 && h.height > 0, ErrorKind::format, "PGM dimensions must be positive");
  require(pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos])), ErrorKind::length,
          "PGM header is truncated");
  h.data_offset = pos + 1;
  return h;
}

}  // namespace detail

inline scene::DepthImage parse_depth_pgm(const std::string& bytes) {
  const auto h = detail::parse_pgm_header(bytes);
  require(h.maxval == 65535, ErrorKind::format,
          "depth PGM must have maxval 65535, got " + std::to_string(h.maxval));
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height * 2;
  require(bytes.size() - h.data_offset >= need, ErrorKind::length,
          "depth PGM payload is truncated: need " + std::to_string(need) + " bytes, have " +
              std::to_string(bytes.size() - h.data_offset));
  scene::DepthImage img(h.width, h.height);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + h.data_offset);
  for (std::size_t i = 0; i < img.data.size(); ++i)
    img.data[i] = static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  return img;
}

inline scene::GrayImage parse_mask_pgm(const std::string& bytes) {
  const auto h = detail::parse_pgm_header(bytes);
  require(h.maxval == 255, ErrorKind::format, "mask PGM must have maxval 255, got " + std::to_string(h.maxval));
  const std::size_t need = static_cast<std::size_t>(h.width) * h.height;
  require(bytes.size() - h.data_offset >= need, ErrorKind::length, "mask PGM payload is truncated");
  scene::GrayImage img(h.width, h.height);
  std::copy_n(reinterpret_cast<const std::uint8_t*>(bytes.data() + h.data_offset), need, img.data.begin());
  return img;
}

inline std::string format_depth_pgm(const scene::DepthImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n65535\n";
  out.reserve(out.size() + img.data.size() * 2);
  for (std::uint16_t v : img.data) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

inline std::string format_mask_pgm(const scene::GrayImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.data.data()), img.data.size());
  return out;
}

inline scene::DepthImage read_depth_pgm(const std::filesystem::path& path) {
  return parse_depth_pgm(detail::read_all(path));
}
inline scene::GrayImage read_mask_pgm(const std::filesystem::path& path) {
  return parse_mask_pgm(detail::read_all(path));
}
inline void write_depth_pgm(const scene::DepthImage& img, const std::filesystem::path& path) {
  detail::write_all(path, format_depth_pgm(img));
}
inline void write_mask_pgm(const scene::GrayImage& img, const std::filesystem::path& path) {
  detail::write_all(path, format_mask_pgm(img));
}

// ---------------------------------------------------------------------------
// Pose lists: [{"translation":[x,y,z], "quaternion":[x,y,z,w], "quality":q}, ...]
// ---------------------------------------------------------------------------

inline std::vector<geometry::ExecutablePose> parse_pose_list(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("malformed pose list: ") + e.what());
  }
  require(j.is_array(), ErrorKind::parse, "pose list must be a JSON array");
  std::vector<geometry::ExecutablePose> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const json& e = j[i];
    const std::string where = "pose " + std::to_string(i) + ": ";
    require(e.is_object() && e.contains("translation") && e.contains("quaternion") && e.contains("quality"),
            ErrorKind::parse, where + "needs translation, quaternion and quality");
    const json& t = e["translation"];
    const json& q = e["quaternion"];
    require(t.is_array() && t.size() == 3 && q.is_array() && q.size() == 4 && e["quality"].is_number(),
            ErrorKind::parse, where + "translation needs 3 numbers, quaternion 4");
    for (const auto& v : t) require(v.is_number(), ErrorKind::parse, where + "translation entries must be numbers");
    for (const auto& v : q) require(v.is_number(), ErrorKind::parse, where + "quaternion entries must be numbers");
    geometry::ExecutablePose p;
    p.translation = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    p.orientation = {q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>()};
    require(std::abs(p.orientation.norm() - 1.0) <= geometry::kQuaternionInputTolerance, ErrorKind::invalid_pose,
            where + "quaternion is not unit length");
    p.quality = e["quality"].get<double>();
    require(in_unit_interval(p.quality), ErrorKind::domain, where + "quality outside [0,1]");
    out.push_back(p);
  }
  return out;
}

inline std::string format_pose_list(std::span<const geometry::ExecutablePose> poses) {
  json j = json::array();
  for (const auto& p : poses)
    j.push_back({{"translation", {p.translation.x(), p.translation.y(), p.translation.z()}},
                 {"quaternion", {p.orientation.x, p.orientation.y, p.orientation.z, p.orientation.w}},
                 {"quality", p.quality}});
  return j.dump(2) + "\n";
}

inline std::vector<geometry::ExecutablePose> read_pose_list(const std::filesystem::path& path) {
  return parse_pose_list(detail::read_all(path));
}

}  // namespace grab::io
