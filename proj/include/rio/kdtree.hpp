// Copyright 2026, The rio Authors
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

/**
 * \file kdtree.hpp
 * \brief Static 3D kd-tree for k-nearest and fixed-radius queries.
 *
 * Results are ordered by (squared distance, point index), so equal-distance
 * neighbours resolve deterministically toward the lower index.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "rio/geom.hpp"

namespace rio {

struct Neighbor {
  std::size_t index;
  double sq_dist;
};

class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3 &point(std::size_t i) const { return points_[i]; }

  /// The k nearest points, closest first. `exclude` skips one index (used to
  /// drop the query point itself).
  std::vector<Neighbor> knn(const Vec3 &query, std::size_t k,
                            std::size_t exclude = npos) const;

  /// All points with distance <= radius, closest first.
  std::vector<Neighbor> radius(const Vec3 &query, double radius) const;

  /// Any point with distance <= radius.
  bool has_neighbor_within(const Vec3 &query, double radius) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  struct Node {
    std::size_t point;  // index into points_
    int axis;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace rio
