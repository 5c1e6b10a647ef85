#pragma once

#include <cmath>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/kd_tree.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"

namespace asmplan {

namespace detail {

// Mean over `from` of the squared distance to the nearest point of `to`.
inline double mean_nearest_squared(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
  double sum = 0.0;
  if (from.size() * to.size() <= 4096) {
    for (const auto& x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& y : to) best = std::min(best, KdTree3::squared_distance(x, y));
      sum += best;
    }
  } else {
    KdTree3 tree(to);
    for (const auto& x : from) sum += tree.nearest(x).squared_distance;
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace detail

/// Bidirectional Chamfer distance: mean squared nearest-neighbour distance
/// from s1 to s2 plus the same from s2 to s1 (squared meters).
inline double chamfer_distance(const std::vector<Vec3>& s1, const std::vector<Vec3>& s2) {
  if (s1.empty() || s2.empty()) throw InvalidArgument("chamfer distance of an empty cloud");
  return detail::mean_nearest_squared(s1, s2) + detail::mean_nearest_squared(s2, s1);
}

inline double chamfer_distance(const PointCloud& s1, const PointCloud& s2) {
  return chamfer_distance(s1.points, s2.points);
}

struct PartAccuracyOptions {
  double threshold = 0.01;
  /// Compare sqrt(CD) rather than CD against the threshold.
  bool use_root_chamfer = false;
};

/// A part counts as correctly placed when the Chamfer distance between the
/// cloud under the ground-truth pose and under the predicted pose is below
/// the threshold.
inline bool part_accuracy(const Pose& gt_pose, const Pose& pred_pose, const PointCloud& cloud,
                          const PartAccuracyOptions& options = {}) {
  const double cd = chamfer_distance(transform_points(gt_pose, cloud.points), transform_points(pred_pose, cloud.points));
  const double value = options.use_root_chamfer ? std::sqrt(cd) : cd;
  return value < options.threshold;
}

/// Smallest point-to-point distance between two sets.
inline double min_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  if (a.empty() || b.empty()) throw InvalidArgument("min distance of an empty cloud");
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  KdTree3 tree(large);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : small) best = std::min(best, tree.nearest(p).squared_distance);
  return std::sqrt(best);
}

}  // namespace asmplan
