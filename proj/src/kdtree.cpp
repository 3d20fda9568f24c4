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

#include "rio/kdtree.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace rio {

namespace {

bool closer(const Neighbor &a, const Neighbor &b) {
  return a.sq_dist < b.sq_dist || (a.sq_dist == b.sq_dist && a.index < b.index);
}

struct WorseFirst {
  bool operator()(const Neighbor &a, const Neighbor &b) const { return closer(a, b); }
};

}  // namespace

KdTree::KdTree(std::vector<Vec3> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(points_.size());
  root_ = build(0, order_.size(), 0);
}

int KdTree::build(std::size_t begin, std::size_t end, int depth) {
  if (begin >= end) return -1;
  const int axis = depth % 3;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     const double va = points_[a](axis), vb = points_[b](axis);
                     return va < vb || (va == vb && a < b);
                   });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({order_[mid], axis});
  const int l = build(begin, mid, depth + 1);
  const int r = build(mid + 1, end, depth + 1);
  nodes_[static_cast<std::size_t>(id)].left = l;
  nodes_[static_cast<std::size_t>(id)].right = r;
  return id;
}

std::vector<Neighbor> KdTree::knn(const Vec3 &query, std::size_t k,
                                  std::size_t exclude) const {
  std::priority_queue<Neighbor, std::vector<Neighbor>, WorseFirst> heap;
  if (k == 0 || root_ < 0) return {};

  auto visit = [&](auto &&self, int id) -> void {
    if (id < 0) return;
    const Node &n = nodes_[static_cast<std::size_t>(id)];
    const Vec3 &p = points_[n.point];
    if (n.point != exclude) {
      const Neighbor cand{n.point, (p - query).squaredNorm()};
      if (heap.size() < k) {
        heap.push(cand);
      } else if (closer(cand, heap.top())) {
        heap.pop();
        heap.push(cand);
      }
    }
    const double diff = query(n.axis) - p(n.axis);
    const int near = diff <= 0.0 ? n.left : n.right;
    const int far = diff <= 0.0 ? n.right : n.left;
    self(self, near);
    if (heap.size() < k || diff * diff <= heap.top().sq_dist) self(self, far);
  };
  visit(visit, root_);

  std::vector<Neighbor> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<Neighbor> KdTree::radius(const Vec3 &query, double radius) const {
  std::vector<Neighbor> out;
  const double r2 = radius * radius;
  auto visit = [&](auto &&self, int id) -> void {
    if (id < 0) return;
    const Node &n = nodes_[static_cast<std::size_t>(id)];
    const Vec3 &p = points_[n.point];
    const double d2 = (p - query).squaredNorm();
    if (d2 <= r2) out.push_back({n.point, d2});
    const double diff = query(n.axis) - p(n.axis);
    if (diff <= radius) self(self, n.left);
    if (diff >= -radius) self(self, n.right);
  };
  visit(visit, root_);
  std::sort(out.begin(), out.end(), closer);
  return out;
}

bool KdTree::has_neighbor_within(const Vec3 &query, double radius) const {
  const double r2 = radius * radius;
  bool found = false;
  auto visit = [&](auto &&self, int id) -> void {
    if (id < 0 || found) return;
    const Node &n = nodes_[static_cast<std::size_t>(id)];
    const Vec3 &p = points_[n.point];
    if ((p - query).squaredNorm() <= r2) {
      found = true;
      return;
    }
    const double diff = query(n.axis) - p(n.axis);
    if (diff <= radius) self(self, n.left);
    if (diff >= -radius) self(self, n.right);
  };
  visit(visit, root_);
  return found;
}

}  // namespace rio
