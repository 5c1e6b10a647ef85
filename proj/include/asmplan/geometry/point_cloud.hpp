#pragma once

#include <cmath>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

/// N x 3 point set in meters belonging to one part.
struct PointCloud {
  std::vector<Vec3> points;
  PartId part{};

  bool empty() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  /// Euclidean distance from `p` to the box; zero inside.
  double distance(const Vec3& p) const {
    Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(Vec3::Zero());
    return d.norm();
  }

  Vec3 extents() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
};

inline std::vector<Vec3> transform_points(const Pose& pose, const std::vector<Vec3>& points) {
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pose.apply(p));
  return out;
}

inline PointCloud transform_cloud(const Pose& pose, const PointCloud& cloud) {
  return PointCloud{transform_points(pose, cloud.points), cloud.part};
}

inline Vec3 centroid(const std::vector<Vec3>& points) {
  if (points.empty()) throw InvalidArgument("centroid of an empty point set");
  Vec3 c = Vec3::Zero();
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

inline Aabb bounding_box(const std::vector<Vec3>& points) {
  if (points.empty()) throw InvalidArgument("bounding box of an empty point set");
  Aabb box{points.front(), points.front()};
  for (const auto& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

inline bool all_finite(const std::vector<Vec3>& points) {
  for (const auto& p : points)
    if (!p.allFinite()) return false;
  return true;
}

/// Points on the surface of an axis-aligned box centred at the origin, on a
/// grid with at most `spacing` between neighbours along each face.
inline PointCloud make_box_surface_cloud(const Vec3& size, double spacing, PartId part = PartId{}) {
  if (spacing <= 0.0 || (size.array() <= 0.0).any()) throw InvalidArgument("box size and spacing must be positive");
  PointCloud cloud;
  cloud.part = part;
  Eigen::Vector3i steps;
  for (int i = 0; i < 3; ++i) steps[i] = std::max(1, static_cast<int>(std::ceil(size[i] / spacing - 1e-9)));
  const Vec3 half = 0.5 * size;
  for (int i = 0; i <= steps.x(); ++i) {
    for (int j = 0; j <= steps.y(); ++j) {
      for (int k = 0; k <= steps.z(); ++k) {
        bool on_face = i == 0 || i == steps.x() || j == 0 || j == steps.y() || k == 0 || k == steps.z();
        if (!on_face) continue;
        cloud.points.emplace_back(-half.x() + size.x() * i / steps.x(), -half.y() + size.y() * j / steps.y(),
                                  -half.z() + size.z() * k / steps.z());
      }
    }
  }
  return cloud;
}

}  // namespace asmplan
