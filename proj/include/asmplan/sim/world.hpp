#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/kd_tree.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/graph.hpp"

namespace asmplan::sim {

struct PlacedComponent {
  PointCloud cloud;  // local frame
  Pose pose;
};

/// Static scene plus components already placed. Point obstacles are stored in
/// the world frame; boxes are axis-aligned.
struct World {
  std::vector<PointCloud> obstacles;
  std::vector<Aabb> boxes;
  std::map<PartId, PlacedComponent> placed;
  double clearance = 0.005;
  /// Region the planner samples translations from.
  Aabb bounds{Vec3::Constant(-1.0), Vec3::Constant(1.0)};

  void check() const {
    if (!(clearance > 0.0) || !std::isfinite(clearance)) throw InvalidArgument("world clearance must be positive");
    if (!(bounds.min.array() < bounds.max.array()).all()) throw InvalidArgument("world bounds are empty");
    for (const auto& [id, c] : placed)
      if (!is_valid_pose(c.pose)) throw InvalidArgument("placed component " + std::to_string(id.value) + " has an invalid pose");
  }

  /// Copy with `id` placed at `pose`; placed poses of other parts are untouched.
  World with_placed(PartId id, const PointCloud& cloud, const Pose& pose) const {
    World w = *this;
    w.placed[id] = PlacedComponent{cloud, pose};
    return w;
  }

  /// All point obstacles in the world frame, optionally skipping one part.
  std::vector<Vec3> obstacle_points(std::optional<PartId> skip = std::nullopt) const {
    std::vector<Vec3> out;
    for (const auto& o : obstacles) out.insert(out.end(), o.points.begin(), o.points.end());
    for (const auto& [id, c] : placed) {
      if (skip && *skip == id) continue;
      for (const auto& p : c.cloud.points) out.push_back(c.pose.apply(p));
    }
    return out;
  }
};

/// Point-versus-scene proximity queries. A query point collides when it lies
/// within `clearance + margin` of an obstacle point or of a box.
class CollisionChecker {
 public:
  CollisionChecker(const World& world, std::optional<PartId> skip = std::nullopt)
      : clearance_(world.clearance), boxes_(world.boxes), points_(world.obstacle_points(skip)) {
    world.check();
    if (!points_.empty()) {
      tree_.emplace(points_);
      extent_ = bounding_box(points_);
    }
  }

  // the k-d tree refers to points_
  CollisionChecker(const CollisionChecker&) = delete;
  CollisionChecker& operator=(const CollisionChecker&) = delete;

  double clearance() const noexcept { return clearance_; }

  bool point_collides(const Vec3& p, double margin = 0.0) const {
    const double r = clearance_ + margin;
    for (const auto& b : boxes_)
      if (b.distance(p) <= r) return true;
    if (points_.empty()) return false;
    if (extent_.distance(p) > r) return false;
    return tree_->any_within(p, r * r);
  }

  /// `local` placed at `pose`. `radius` is max |p| over the local cloud (pass
  /// a negative value to have it computed) and enables a sphere broad phase.
  bool collides(const std::vector<Vec3>& local, const Pose& pose, double margin = 0.0, double radius = -1.0) const {
    if (local.empty()) return false;
    if (radius < 0.0) radius = cloud_radius(local);
    const double r = clearance_ + margin;
    bool near_box = false;
    for (const auto& b : boxes_)
      if (b.distance(pose.translation) <= radius + r) near_box = true;
    bool near_points = false;
    if (tree_) {
      const double d2 = tree_->nearest(pose.translation).squared_distance;
      const double reach = radius + r;
      near_points = d2 <= reach * reach;
    }
    if (!near_box && !near_points) return false;
    const Eigen::Matrix3d rot = pose.rotation.toRotationMatrix();
    for (const auto& p : local)
      if (point_collides(rot * p + pose.translation, margin)) return true;
    return false;
  }

  static double cloud_radius(const std::vector<Vec3>& local) {
    double r = 0.0;
    for (const auto& p : local) r = std::max(r, p.norm());
    return r;
  }

 private:
  double clearance_;
  std::vector<Aabb> boxes_;
  std::vector<Vec3> points_;
  std::optional<KdTree3> tree_;
  Aabb extent_;
};

/// True iff `cloud` (local frame) placed at `pose` comes within the world's
/// clearance of any obstacle point, placed component or box.
inline bool collides(const World& world, const PointCloud& cloud, const Pose& pose) {
  return CollisionChecker(world).collides(cloud.points, pose);
}

}  // namespace asmplan::sim
