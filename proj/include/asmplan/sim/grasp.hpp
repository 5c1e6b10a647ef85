#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pca.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"

namespace asmplan::sim {

enum class GraspStrategy { stick, flat_thin };

inline const char* to_string(GraspStrategy s) { return s == GraspStrategy::stick ? "stick" : "flat_thin"; }

struct GraspOptions {
  double stick_ratio = 3.0;       // longest / middle extent
  double flat_ratio = 0.2;        // shortest / middle extent
  double below_top = 0.03;        // metres under the top surface for flat parts
};

struct GraspSpec {
  /// Gripper frame in the world: z is the approach direction, x the closing
  /// direction of the fingers.
  Pose pose;
  GraspStrategy strategy = GraspStrategy::stick;
  Vec3 contact = Vec3::Zero();
  Vec3 extents = Vec3::Zero();  // principal extents, non-increasing
};

namespace detail {

inline Quat gripper_frame(const Vec3& closing_hint) {
  const Vec3 z(0, 0, -1);  // top-down approach
  Vec3 x(closing_hint.x(), closing_hint.y(), 0.0);
  if (x.norm() < 1e-9) x = Vec3::UnitX();
  x.normalize();
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = z.cross(x);
  r.col(2) = z;
  return Quat(r).normalized();
}

}  // namespace detail

/// Classifies the posed part by its principal extents and picks a grasp.
///  stick (longest/middle >= stick_ratio, also the fallback): contact at the
///  centroid, fingers closing across the longest axis;
///  flat_thin (shortest/middle <= flat_ratio): contact `below_top` under the
///  highest point, fingers closing across the thickness.
inline GraspSpec heuristic_grasp(const PointCloud& cloud, const Pose& pose, const GraspOptions& options = {}) {
  PointCloud world = transform_cloud(pose, cloud);
  const CanonicalFrame frame = pca_canonicalize(world);
  const Aabb local = bounding_box(frame.canonical.points);
  Vec3 ext = local.extents();
  std::sort(ext.data(), ext.data() + 3, std::greater<>());
  if (!(ext[1] > 0.0)) throw InvalidArgument("degenerate cloud: grasp needs two non-zero extents");

  const Eigen::Matrix3d axes = frame.canonical_pose.rotation.toRotationMatrix();
  const Aabb box = bounding_box(world.points);
  const Vec3 c = centroid(world.points);

  GraspSpec out;
  out.extents = ext;
  const bool stick = ext[0] / ext[1] >= options.stick_ratio;
  const bool flat = ext[2] / ext[1] <= options.flat_ratio;
  if (!stick && flat) {
    out.strategy = GraspStrategy::flat_thin;
    const double z = std::clamp(box.max.z() - options.below_top, box.min.z(), box.max.z());
    out.contact = Vec3(c.x(), c.y(), z);
    out.pose.rotation = detail::gripper_frame(axes.col(2));
  } else {
    out.strategy = GraspStrategy::stick;
    out.contact = c;
    // close across the long axis: perpendicular to it in the horizontal plane
    const Vec3 longest = axes.col(0);
    Vec3 across = Vec3::UnitZ().cross(longest);
    out.pose.rotation = detail::gripper_frame(across);
  }
  out.pose.translation = out.contact;
  return out;
}

}  // namespace asmplan::sim
