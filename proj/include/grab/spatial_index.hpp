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

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "grab/core.hpp"

namespace grab {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Static 3-d tree over a borrowed point array. Queries return exactly what an
/// exhaustive scan returns, including the smallest-index tie-break.
class KdTree {
 public:
  explicit KdTree(std::span<const Vec3> points) : points_(points) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    if (!order_.empty()) root_ = build(0, order_.size(), 0);
  }

  std::size_t size() const { return points_.size(); }

  Neighbor nearest(const Vec3& q) const {
    require(!points_.empty(), ErrorKind::domain, "nearest neighbour in an empty cloud");
    Best best;
    search(root_, q, best);
    return {best.index, std::sqrt(best.dist2)};
  }

 private:
  struct Node {
    std::size_t begin;
    std::size_t end;
    int axis;  // -1 for leaves
    double split;
    std::int32_t left;
    std::int32_t right;
  };

  struct Best {
    double dist2 = std::numeric_limits<double>::infinity();
    std::size_t index = std::numeric_limits<std::size_t>::max();
  };

  static constexpr std::size_t kLeafSize = 12;

  static double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
  }

  std::int32_t build(std::size_t begin, std::size_t end, int depth) {
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end, -1, 0.0, -1, -1});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]];
    Vec3 hi = lo;
    for (std::size_t i = begin; i < end; ++i) {
      lo = lo.cwiseMin(points_[order_[i]]);
      hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];
    const std::int32_t left = build(begin, mid, depth + 1);
    const std::int32_t right = build(mid, end, depth + 1);
    nodes_[id].axis = axis;
    nodes_[id].split = split;
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search(std::int32_t id, const Vec3& q, Best& best) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.axis < 0) {
      for (std::size_t i = n.begin; i < n.end; ++i) {
        const std::size_t idx = order_[i];
        const double d2 = squared_distance(q, points_[idx]);
        if (d2 < best.dist2 || (d2 == best.dist2 && idx < best.index)) {
          best.dist2 = d2;
          best.index = idx;
        }
      }
      return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double diff = q[n.axis] - n.split;
    const std::int32_t first = diff <= 0.0 ? n.left : n.right;
    const std::int32_t second = diff <= 0.0 ? n.right : n.left;
    search(first, q, best);
    // Visit the far side when it could hold an equal-or-closer point (ties matter).
    if (diff * diff <= best.dist2) search(second, q, best);
  }

  std::span<const Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = 0;
};

}  // namespace grab
