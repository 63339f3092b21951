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

// Occupancy from depth images and the clutter score Q_C.
//
// Pipeline: binarise the workspace mask, trace outer contours, prune redundant
// vertices, keep the largest contour as the workspace region, trim its edges,
// then count depth-filtered object pixels inside it.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "grab/core.hpp"

namespace grab::scene {

template <typename T>
struct Image {
  int width = 0;
  int height = 0;
  std::vector<T> data;  // row-major

  Image() = default;
  Image(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    require(w > 0 && h > 0, ErrorKind::domain, "image dimensions must be positive");
  }

  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
  T& at(int x, int y) { return data[index(x, y)]; }
  const T& at(int x, int y) const { return data[index(x, y)]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }
  std::size_t pixel_count() const { return data.size(); }
};

/// Depth in millimetres, 0 = invalid.
using DepthImage = Image<std::uint16_t>;
using GrayImage = Image<std::uint8_t>;

struct BinaryMask : Image<std::uint8_t> {
  BinaryMask() = default;
  BinaryMask(int w, int h, bool fill = false) : Image<std::uint8_t>(w, h, fill ? 1 : 0) {}

  bool get(int x, int y) const { return contains(x, y) && at(x, y) != 0; }
  void set(int x, int y, bool v) { at(x, y) = v ? 1 : 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(data.begin(), data.end(), [](std::uint8_t v) { return v != 0; }));
  }
};

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct Contour {
  std::vector<Pixel> vertices;  // closed polygon, last connects back to first
};

struct OccupancyResult {
  std::size_t workspace_pixels = 0;
  std::size_t object_pixels = 0;
  double ratio = 0.0;
};

struct ClutterState {
  int n_initial = 1;
  int n_before = 1;
  double o_initial = 1.0;
  double o_before = 1.0;
};

inline constexpr std::uint16_t kDefaultMinDepthMm = 250;
inline constexpr std::uint16_t kDefaultMaxDepthMm = 525;
inline constexpr double kDefaultContourEpsilon = 0.5;
inline constexpr int kDefaultTrim = 2;

template <typename T>
BinaryMask binarize(const Image<T>& img, T threshold) {
  BinaryMask m(img.width, img.height);
  for (std::size_t i = 0; i < img.data.size(); ++i) m.data[i] = img.data[i] >= threshold ? 1 : 0;
  return m;
}

namespace detail {

// Moore neighbourhood, clockwise on screen (y grows downwards), starting west.
inline constexpr std::array<Pixel, 8> kMoore{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}}};

inline int direction_of(Pixel from, Pixel to) {
  for (int d = 0; d < 8; ++d)
    if (from.x + kMoore[d].x == to.x && from.y + kMoore[d].y == to.y) return d;
  return -1;
}

/// Moore boundary tracing from the topmost-then-leftmost pixel of a component.
/// Terminates when the start pixel is about to repeat its first move.
inline std::vector<Pixel> trace_boundary(const BinaryMask& m, Pixel start) {
  std::vector<Pixel> out{start};
  Pixel cur = start;
  Pixel back{start.x - 1, start.y};
  std::optional<Pixel> first_move;
  const std::size_t limit = 8 * m.pixel_count() + 8;
  for (std::size_t steps = 0; steps < limit; ++steps) {
    const int d0 = direction_of(cur, back);
    Pixel prev = back;
    std::optional<Pixel> next;
    for (int k = 1; k <= 8; ++k) {
      const int d = (d0 + k) % 8;
      const Pixel cand{cur.x + kMoore[d].x, cur.y + kMoore[d].y};
      if (m.get(cand.x, cand.y)) {
        next = cand;
        break;
      }
      prev = cand;
    }
    if (!next) return out;  // isolated pixel
    if (!first_move) {
      first_move = next;
    } else if (cur == start && *next == *first_move) {
      break;
    }
    back = prev;
    cur = *next;
    out.push_back(cur);
  }
  while (out.size() > 1 && out.back() == out.front()) out.pop_back();
  return out;
}

inline std::vector<int> label_components(const BinaryMask& m) {
  std::vector<int> labels(m.pixel_count(), -1);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (!m.get(x, y) || labels[m.index(x, y)] >= 0) continue;
      labels[m.index(x, y)] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (const Pixel& d : kMoore) {
          const int nx = p.x + d.x, ny = p.y + d.y;
          if (m.get(nx, ny) && labels[m.index(nx, ny)] < 0) {
            labels[m.index(nx, ny)] = next;
            stack.push_back({nx, ny});
          }
        }
      }
      ++next;
    }
  }
  return labels;
}

inline double point_segment_distance(double px, double py, Pixel a, Pixel b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - a.x) * dx + (py - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = a.x + t * dx - px, ey = a.y + t * dy - py;
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace detail

/// Filled-polygon rasterisation (even-odd rule on pixel centres) plus every
/// integer point lying on an edge.
inline BinaryMask fill_contour(const Contour& c, int width, int height) {
  BinaryMask m(width, height);
  const auto& v = c.vertices;
  const std::size_t n = v.size();
  if (n == 0) return m;
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Pixel a = v[i], b = v[j];
      if ((a.y > y) != (b.y > y))
        xs.push_back(a.x + static_cast<double>(y - a.y) * (b.x - a.x) / static_cast<double>(b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    // Pixel x is inside when an odd number of crossings lie strictly to its right.
    std::size_t right = 0;  // first crossing > x
    for (int x = 0; x < width; ++x) {
      while (right < xs.size() && xs[right] <= x) ++right;
      if ((xs.size() - right) % 2 == 1) m.set(x, y, true);
    }
  }
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Pixel a = v[j], b = v[i];
    const int dx = b.x - a.x, dy = b.y - a.y;
    const int g = std::max(1, std::gcd(std::abs(dx), std::abs(dy)));
    for (int k = 0; k <= g; ++k) {
      const int x = a.x + k * (dx / g), y = a.y + k * (dy / g);
      if (m.contains(x, y)) m.set(x, y, true);
    }
  }
  return m;
}

/// Even-odd containment of a pixel centre, boundary included.
inline bool contour_contains(const Contour& c, Pixel p) {
  const auto& v = c.vertices;
  const std::size_t n = v.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Pixel a = v[i], b = v[j];
    if (detail::point_segment_distance(p.x, p.y, a, b) < 1e-9) return true;
    if ((a.y > p.y) != (b.y > p.y)) {
      const double xi = a.x + static_cast<double>(p.y - a.y) * (b.x - a.x) / static_cast<double>(b.y - a.y);
      if (p.x < xi) inside = !inside;
    }
  }
  return inside;
}

/// One outer contour per 8-connected foreground component; holes are ignored
/// and components nested inside another component's outline are skipped.
/// Components whose boundary has fewer than 3 vertices are not reported.
/// Each trace starts at the component's topmost-then-leftmost pixel and runs clockwise.
inline std::vector<Contour> extract_outer_contours(const BinaryMask& mask) {
  const std::vector<int> labels = detail::label_components(mask);
  std::vector<Contour> traced;
  std::vector<Pixel> starts;
  int seen = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      const int l = labels[mask.index(x, y)];
      if (l != seen) continue;
      ++seen;
      traced.push_back({detail::trace_boundary(mask, {x, y})});
      starts.push_back({x, y});
    }
  }

  std::vector<Contour> out;
  for (std::size_t i = 0; i < traced.size(); ++i) {
    if (traced[i].vertices.size() < 3) continue;
    bool nested = false;
    for (std::size_t j = 0; j < traced.size() && !nested; ++j) {
      if (j == i || traced[j].vertices.size() < 3) continue;
      // Components are disjoint, so the start pixel is inside j's outline only if nested in a hole.
      nested = contour_contains(traced[j], starts[i]);
    }
    if (!nested) out.push_back(traced[i]);
  }
  return out;
}

/// Iterative collinearity pruning: a vertex goes when every original vertex
/// between its retained neighbours lies within `epsilon` of their chord.
inline Contour compress_contour(const Contour& c, double epsilon = kDefaultContourEpsilon) {
  const std::size_t n = c.vertices.size();
  if (n <= 3) return c;
  std::vector<bool> keep(n, true);
  std::size_t kept = n;

  auto prev_kept = [&](std::size_t i) {
    std::size_t j = (i + n - 1) % n;
    while (!keep[j]) j = (j + n - 1) % n;
    return j;
  };
  auto next_kept = [&](std::size_t i) {
    std::size_t j = (i + 1) % n;
    while (!keep[j]) j = (j + 1) % n;
    return j;
  };

  bool changed = true;
  while (changed && kept > 3) {
    changed = false;
    for (std::size_t i = 0; i < n && kept > 3; ++i) {
      if (!keep[i]) continue;
      const std::size_t a = prev_kept(i);
      const std::size_t b = next_kept(i);
      const Pixel pa = c.vertices[a], pb = c.vertices[b];
      bool ok = true;
      for (std::size_t k = (a + 1) % n; k != b && ok; k = (k + 1) % n)
        ok = detail::point_segment_distance(c.vertices[k].x, c.vertices[k].y, pa, pb) <= epsilon;
      if (ok) {
        keep[i] = false;
        --kept;
        changed = true;
      }
    }
  }

  Contour out;
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i]) out.vertices.push_back(c.vertices[i]);
  return out;
}

/// Shoelace area (absolute value).
inline double contour_area(const Contour& c) {
  const auto& v = c.vertices;
  double twice = 0.0;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++)
    twice += static_cast<double>(v[j].x) * v[i].y - static_cast<double>(v[i].x) * v[j].y;
  return std::abs(twice) / 2.0;
}

inline const Contour& largest_contour(std::span<const Contour> cs) {
  require(!cs.empty(), ErrorKind::domain, "no contours to choose from");
  std::size_t best = 0;
  double best_area = contour_area(cs[0]);
  for (std::size_t i = 1; i < cs.size(); ++i) {
    const double a = contour_area(cs[i]);
    if (a > best_area) {
      best = i;
      best_area = a;
    }
  }
  return cs[best];
}

/// Clears pixels within the margins of the foreground's bounding box edges.
inline BinaryMask trim_region(const BinaryMask& mask, int h_margin, int v_margin) {
  require(h_margin >= 0 && v_margin >= 0, ErrorKind::domain, "trim margins must be non-negative");
  require(2 * h_margin < mask.width && 2 * v_margin < mask.height, ErrorKind::domain,
          "trim margins must be less than half the image dimensions");
  int x0 = mask.width, x1 = -1, y0 = mask.height, y1 = -1;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.get(x, y)) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
  BinaryMask out = mask;
  if (x1 < 0) return out;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (x < x0 + h_margin || x > x1 - h_margin || y < y0 + v_margin || y > y1 - v_margin) out.set(x, y, false);
  return out;
}

/// Inclusive depth band; zero depth is always invalid.
inline BinaryMask depth_filter(const DepthImage& d, std::uint16_t min_mm = kDefaultMinDepthMm,
                               std::uint16_t max_mm = kDefaultMaxDepthMm) {
  require(min_mm < max_mm, ErrorKind::domain, "depth band must satisfy min < max");
  BinaryMask m(d.width, d.height);
  for (std::size_t i = 0; i < d.data.size(); ++i) {
    const std::uint16_t v = d.data[i];
    m.data[i] = (v != 0 && v >= min_mm && v <= max_mm) ? 1 : 0;
  }
  return m;
}

inline OccupancyResult occupancy(const BinaryMask& workspace, const BinaryMask& objects) {
  require(workspace.width == objects.width && workspace.height == objects.height, ErrorKind::domain,
          "workspace and object masks differ in size");
  OccupancyResult r;
  for (std::size_t i = 0; i < workspace.data.size(); ++i) {
    if (!workspace.data[i]) continue;
    ++r.workspace_pixels;
    if (objects.data[i]) ++r.object_pixels;
  }
  require(r.workspace_pixels > 0, ErrorKind::domain, "workspace has no pixels");
  r.ratio = static_cast<double>(r.object_pixels) / static_cast<double>(r.workspace_pixels);
  return r;
}

struct WorkspaceOptions {
  std::uint8_t mask_threshold = 128;
  double contour_epsilon = kDefaultContourEpsilon;
  int h_trim = kDefaultTrim;
  int v_trim = kDefaultTrim;
};

/// Workspace region from an 8-bit mask: binarise, outer contours, compress,
/// largest, fill, trim.
inline BinaryMask workspace_region(const GrayImage& mask, const WorkspaceOptions& opt = {}) {
  const BinaryMask bin = binarize<std::uint8_t>(mask, opt.mask_threshold);
  const std::vector<Contour> contours = extract_outer_contours(bin);
  require(!contours.empty(), ErrorKind::data, "workspace mask contains no region");
  std::vector<Contour> compressed;
  compressed.reserve(contours.size());
  for (const Contour& c : contours) compressed.push_back(compress_contour(c, opt.contour_epsilon));
  const Contour& big = largest_contour(compressed);
  return trim_region(fill_contour(big, mask.width, mask.height), opt.h_trim, opt.v_trim);
}

struct OccupancyOptions {
  WorkspaceOptions workspace;
  std::uint16_t min_mm = kDefaultMinDepthMm;
  std::uint16_t max_mm = kDefaultMaxDepthMm;
};

inline OccupancyResult scene_occupancy(const DepthImage& depth, const GrayImage& mask,
                                       const OccupancyOptions& opt = {}) {
  require(depth.width == mask.width && depth.height == mask.height, ErrorKind::domain,
          "depth image and workspace mask differ in size");
  return occupancy(workspace_region(mask, opt.workspace), depth_filter(depth, opt.min_mm, opt.max_mm));
}

/// Zero for single-object scenes, otherwise the product of the remaining-object
/// and remaining-occupancy ratios, clamped to [0,1].
inline double clutter_score(const ClutterState& s, int initial_scene_count) {
  require(initial_scene_count >= 1, ErrorKind::domain, "scene must start with at least one object");
  if (initial_scene_count == 1) return 0.0;
  require(s.n_initial >= 1 && s.n_before >= 1 && s.n_before <= s.n_initial, ErrorKind::domain,
          "object counts must satisfy 1 <= n_before <= n_initial");
  require(s.o_initial > 0.0, ErrorKind::domain, "initial occupancy must be positive in a cluttered scene");
  require(s.o_initial <= 1.0 && in_unit_interval(s.o_before), ErrorKind::domain,
          "occupancy ratios must lie in [0,1]");
  const double q = (static_cast<double>(s.n_before) / s.n_initial) * (s.o_before / s.o_initial);
  return std::clamp(q, 0.0, 1.0);
}

inline double clutter_score(const ClutterState& s) { return clutter_score(s, s.n_initial); }

}  // namespace grab::scene
