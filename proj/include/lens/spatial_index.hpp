// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "lens/geometry.hpp"

namespace lens {

// Exact nearest-neighbour queries over a fixed point set (median-split
// kd-tree with branch-and-bound descent). Results match a brute-force scan
// bit-for-bit: no approximation, and distance ties resolve to the lowest
// index in the original insertion order. An empty index reports distance
// +infinity and index npos.
class SpatialIndex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Vec3> points);

  // (original index, euclidean distance) of the nearest point.
  std::pair<std::size_t, double> nearest(const Vec3& query) const;

  double nearest_distance(const Vec3& query) const { return nearest(query).second; }

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

 private:
  struct Node {
    int axis = -1;          // -1 marks a leaf
    double split = 0.0;     // splitting coordinate (axis value of the median)
    std::size_t begin = 0;  // leaf: range into order_
    std::size_t end = 0;
    int left = -1;          // children as indices into nodes_
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, const Vec3& query, std::size_t& best_idx,
              double& best_sq) const;

  std::vector<Vec3> points_;        // original order
  std::vector<std::size_t> order_;  // permutation grouped by tree leaves
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace lens
