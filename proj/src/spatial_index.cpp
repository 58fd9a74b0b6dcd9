// SPDX-License-Identifier: Apache-2.0
#include "lens/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lens/errors.hpp"

namespace lens {

namespace {

constexpr std::size_t kLeafSize = 8;

double dist_sq(const Vec3& a, const Vec3& b) {
  const Vec3 d = a - b;
  return dot(d, d);
}

}  // namespace

SpatialIndex::SpatialIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  for (const Vec3& p : points_)
    if (!is_finite(p)) throw DomainError("spatial index: non-finite point");
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty())
    root_ = build(0, points_.size(), 0);
}

int SpatialIndex::build(std::size_t begin, std::size_t end, int depth) {
  Node node;
  if (end - begin <= kLeafSize) {
    node.begin = begin;
    node.end = end;
    nodes_.push_back(node);
    return static_cast<int>(nodes_.size() - 1);
  }

  // Split on the widest axis of this subset; degenerate spreads still split
  // fine because the median partition always leaves both halves non-empty.
  Vec3 lo = points_[order_[begin]], hi = lo;
  for (std::size_t k = begin; k < end; ++k) {
    lo = component_min(lo, points_[order_[k]]);
    hi = component_max(hi, points_[order_[k]]);
  }
  const Vec3 spread = hi - lo;
  int axis = 0;
  if (spread.y > spread[axis]) axis = 1;
  if (spread.z > spread[axis]) axis = 2;

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end, [&](std::size_t a, std::size_t b) {
                     const double ca = points_[a][axis], cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });

  node.axis = axis;
  node.split = points_[order_[mid]][axis];
  nodes_.push_back(node);
  const int self = static_cast<int>(nodes_.size() - 1);
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[self].left = left;
  nodes_[self].right = right;
  return self;
}

void SpatialIndex::search(int node_idx, const Vec3& query, std::size_t& best_idx,
                          double& best_sq) const {
  const Node& node = nodes_[node_idx];
  if (node.axis < 0) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t idx = order_[k];
      const double d2 = dist_sq(query, points_[idx]);
      if (d2 < best_sq || (d2 == best_sq && idx < best_idx)) {
        best_sq = d2;
        best_idx = idx;
      }
    }
    return;
  }

  const double delta = query[node.axis] - node.split;
  const int near = delta < 0.0 ? node.left : node.right;
  const int far = delta < 0.0 ? node.right : node.left;
  search(near, query, best_idx, best_sq);
  // `<=` keeps equidistant points on the far side reachable so the
  // lowest-index tie rule holds exactly.
  if (delta * delta <= best_sq) search(far, query, best_idx, best_sq);
}

std::pair<std::size_t, double> SpatialIndex::nearest(const Vec3& query) const {
  if (!is_finite(query)) throw DomainError("spatial index: non-finite query");
  if (points_.empty())
    return {npos, std::numeric_limits<double>::infinity()};
  std::size_t best_idx = npos;
  double best_sq = std::numeric_limits<double>::infinity();
  search(root_, query, best_idx, best_sq);
  return {best_idx, std::sqrt(best_sq)};
}

}  // namespace lens
