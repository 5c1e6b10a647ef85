#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "asmplan/geometry/pose.hpp"

namespace asmplan {

/// Static 3-d tree for exact nearest-neighbour queries. Distances are computed
/// with the same expression as a brute-force scan, so the minimum squared
/// distance it returns is bit-identical to one.
class KdTree3 {
 public:
  explicit KdTree3(const std::vector<Vec3>& points) : points_(points), index_(points.size()) {
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    nodes_.reserve(points.size());
    if (!points.empty()) root_ = build(0, index_.size(), 0);
  }

  struct Hit {
    std::size_t index = 0;
    double squared_distance = std::numeric_limits<double>::infinity();
  };

  Hit nearest(const Vec3& q) const {
    Hit best;
    if (root_ >= 0) search(root_, q, best);
    return best;
  }

  /// True iff some point lies within squared distance `r2` of `q`.
  bool any_within(const Vec3& q, double r2) const { return root_ >= 0 && within(root_, q, r2); }

  static double squared_distance(const Vec3& a, const Vec3& b) {
    const double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
  }

 private:
  struct Node {
    std::size_t point;
    int axis;
    int left = -1;
    int right = -1;
  };

  int build(std::size_t begin, std::size_t end, int depth) {
    if (begin >= end) return -1;
    const int axis = depth % 3;
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                     [&](std::size_t a, std::size_t b) {
                       if (points_[a][axis] != points_[b][axis]) return points_[a][axis] < points_[b][axis];
                       return a < b;
                     });
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(Node{index_[mid], axis});
    const int l = build(begin, mid, depth + 1);
    const int r = build(mid + 1, end, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  void search(int id, const Vec3& q, Hit& best) const {
    const Node& n = nodes_[id];
    const Vec3& p = points_[n.point];
    const double d2 = squared_distance(q, p);
    if (d2 < best.squared_distance || (d2 == best.squared_distance && n.point < best.index)) {
      best.squared_distance = d2;
      best.index = n.point;
    }
    const double diff = q[n.axis] - p[n.axis];
    const int near = diff <= 0 ? n.left : n.right;
    const int far = diff <= 0 ? n.right : n.left;
    if (near >= 0) search(near, q, best);
    if (far >= 0 && diff * diff <= best.squared_distance) search(far, q, best);
  }

  bool within(int id, const Vec3& q, double r2) const {
    const Node& n = nodes_[id];
    const Vec3& p = points_[n.point];
    if (squared_distance(q, p) <= r2) return true;
    const double diff = q[n.axis] - p[n.axis];
    const int near = diff <= 0 ? n.left : n.right;
    const int far = diff <= 0 ? n.right : n.left;
    if (near >= 0 && within(near, q, r2)) return true;
    return far >= 0 && diff * diff <= r2 && within(far, q, r2);
  }

  const std::vector<Vec3>& points_;
  std::vector<std::size_t> index_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace asmplan
