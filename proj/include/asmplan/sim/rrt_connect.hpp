#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/random.hpp"
#include "asmplan/sim/world.hpp"

namespace asmplan::sim {

struct PlannerParams {
  /// Maximum edge length in the blended metric ||dt|| + rotation_weight * angle.
  double step_size = 0.05;
  double rotation_weight = 0.3;  // m / rad
  std::size_t max_iterations = 50'000;
  /// Probability of sampling the other tree's root instead of a random pose.
  double goal_bias = 0.05;
  std::uint64_t seed = 0;
  /// Edge sample spacing in the blended metric.
  double resolution = 0.005;
  std::size_t shortcut_attempts = 100;

  void check() const {
    for (double v : {step_size, rotation_weight, resolution})
      if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("planner step, rotation weight and resolution must be positive");
    if (max_iterations == 0) throw InvalidArgument("planner needs at least one iteration");
    if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw InvalidArgument("goal bias must lie in [0, 1]");
  }
};

inline double se3_distance(const Pose& a, const Pose& b, double rotation_weight) {
  return (a.translation - b.translation).norm() + rotation_weight * geodesic_distance(a.rotation, b.rotation);
}

enum class PlanStatus { success, start_in_collision, goal_in_collision, no_path };

inline const char* to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::success: return "success";
    case PlanStatus::start_in_collision: return "start_in_collision";
    case PlanStatus::goal_in_collision: return "goal_in_collision";
    case PlanStatus::no_path: return "no_path";
  }
  return "unknown";
}

struct PlanResult {
  PlanStatus status = PlanStatus::no_path;
  std::vector<Pose> path;  // start ... goal when status == success
  std::size_t iterations = 0;
  std::size_t tree_nodes = 0;

  bool ok() const noexcept { return status == PlanStatus::success; }
};

/// Checks straight SE(3) edges (slerp + lerp) for one moving cloud.
class EdgeValidator {
 public:
  EdgeValidator(const CollisionChecker& checker, const std::vector<Vec3>& local, const PlannerParams& params)
      : checker_(checker), local_(local), params_(params), radius_(CollisionChecker::cloud_radius(local)) {}

  bool pose_free(const Pose& p, double margin = 0.0) const { return !checker_.collides(local_, p, margin, radius_); }

  /// Samples every `resolution` of blended length. Interior samples are
  /// tested with a margin covering how far any point can travel within half a
  /// sample interval, so configurations between samples stay clear too. The
  /// endpoints themselves are tested at the plain clearance.
  bool edge_free(const Pose& a, const Pose& b, bool check_endpoints = true) const {
    const double length = se3_distance(a, b, params_.rotation_weight);
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / params_.resolution)));
    const double sweep = (a.translation - b.translation).norm() + radius_ * geodesic_distance(a.rotation, b.rotation);
    const double margin = 0.5 * sweep / static_cast<double>(n);
    if (check_endpoints && (!pose_free(a) || !pose_free(b))) return false;
    for (std::size_t i = 1; i < n; ++i)
      if (!pose_free(interpolate(a, b, static_cast<double>(i) / static_cast<double>(n)), margin)) return false;
    return true;
  }

 private:
  const CollisionChecker& checker_;
  const std::vector<Vec3>& local_;
  const PlannerParams& params_;
  double radius_;
};

namespace detail {

// Nearest node under the blended metric. Nodes are bucketed by translation;
// since the metric is at least the translation distance, rings of buckets
// are searched outward until no closer node can remain. Ties go to the lower
// node index, so the result does not depend on visiting order.
class NearestIndex {
 public:
  NearestIndex(const std::vector<Pose>& nodes, double cell, double rotation_weight)
      : nodes_(nodes), cell_(cell), w_(rotation_weight) {}

  void add(std::size_t index) {
    const auto c = cell_of(nodes_[index].translation);
    grid_[key(c)].push_back(index);
    if (count_++ == 0) {
      lo_ = hi_ = c;
    } else {
      for (int k = 0; k < 3; ++k) {
        lo_[k] = std::min(lo_[k], c[k]);
        hi_[k] = std::max(hi_[k], c[k]);
      }
    }
  }

  std::size_t nearest(const Pose& q) const {
    const auto c = cell_of(q.translation);
    std::int64_t max_ring = 0;
    for (int k = 0; k < 3; ++k) max_ring = std::max({max_ring, std::abs(c[k] - lo_[k]), std::abs(hi_[k] - c[k])});
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    auto consider = [&](std::size_t i) {
      const double d = se3_distance(nodes_[i], q, w_);
      if (d < best || (d == best && i < best_index)) {
        best = d;
        best_index = i;
      }
    };
    for (std::int64_t r = 0; r <= max_ring; ++r) {
      if (best < static_cast<double>(r - 1) * cell_) return best_index;
      const auto side = static_cast<std::size_t>(2 * r + 1);
      if (side * side * side > 4 * count_) {
        // sparse tree far away: a plain scan is cheaper
        for (std::size_t i = 0; i < count_; ++i) consider(i);
        return best_index;
      }
      for (std::int64_t dx = -r; dx <= r; ++dx)
        for (std::int64_t dy = -r; dy <= r; ++dy)
          for (std::int64_t dz = -r; dz <= r; ++dz) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
            auto it = grid_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
            if (it == grid_.end()) continue;
            for (std::size_t i : it->second) consider(i);
          }
    }
    return best_index;
  }

 private:
  using Cell = std::array<std::int64_t, 3>;

  Cell cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)), static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }

  static std::uint64_t key(const Cell& c) {
    auto u = [](std::int64_t v) { return static_cast<std::uint64_t>(v + (1LL << 20)) & ((1ULL << 21) - 1); };
    return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
  }

  const std::vector<Pose>& nodes_;
  double cell_;
  double w_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
  Cell lo_{}, hi_{};
  std::size_t count_ = 0;
};

struct Tree {
  std::vector<Pose> nodes;
  std::vector<std::size_t> parent;
  NearestIndex index;

  Tree(const Pose& root, double cell, double w) : index(nodes, cell, w) {
    nodes.reserve(1 << 16);
    nodes.push_back(root);
    parent.push_back(0);
    index.add(0);
  }
  Tree(const Tree&) = delete;

  std::size_t add(const Pose& p, std::size_t from) {
    nodes.push_back(p);
    parent.push_back(from);
    index.add(nodes.size() - 1);
    return nodes.size() - 1;
  }

  std::vector<Pose> branch(std::size_t i) const {  // node i back to the root
    std::vector<Pose> out{nodes[i]};
    while (i != 0) {
      i = parent[i];
      out.push_back(nodes[i]);
    }
    return out;
  }
};

enum class Extend { trapped, advanced, reached };

inline Pose steer(const Pose& from, const Pose& to, const PlannerParams& params) {
  const double d = se3_distance(from, to, params.rotation_weight);
  if (d <= params.step_size) return to;
  return interpolate(from, to, params.step_size / d);
}

inline Extend extend(Tree& tree, const Pose& target, const EdgeValidator& edges, const PlannerParams& params,
                     std::size_t& added) {
  const std::size_t near = tree.index.nearest(target);
  const Pose next = steer(tree.nodes[near], target, params);
  // the near node is already known to be free; check the edge and the new node
  if (!edges.pose_free(next) || !edges.edge_free(tree.nodes[near], next, false)) return Extend::trapped;
  added = tree.add(next, near);
  return se3_distance(next, target, params.rotation_weight) == 0.0 ? Extend::reached : Extend::advanced;
}

}  // namespace detail

/// Shortcut smoothing: repeatedly try to replace the sub-path between two
/// random waypoints by a straight edge that passes the same edge check.
inline void shortcut_path(std::vector<Pose>& path, const EdgeValidator& edges, std::size_t attempts, Rng& rng) {
  for (std::size_t a = 0; a < attempts && path.size() > 2; ++a) {
    std::size_t i = rng.index(path.size()), j = rng.index(path.size());
    if (i > j) std::swap(i, j);
    if (j - i < 2) continue;
    if (!edges.edge_free(path[i], path[j], false)) continue;
    path.erase(path.begin() + static_cast<long>(i) + 1, path.begin() + static_cast<long>(j));
  }
}

/// Bidirectional RRT-Connect for a free-flying rigid cloud. Translations are
/// sampled uniformly in world.bounds, rotations uniformly on SO(3).
/// Deterministic for a fixed params.seed.
inline PlanResult rrt_connect(const CollisionChecker& checker, const std::vector<Vec3>& cloud, const Pose& start,
                              const Pose& goal, const Aabb& bounds, const PlannerParams& params) {
  params.check();
  if (!is_valid_pose(start) || !is_valid_pose(goal)) throw InvalidArgument("planner start and goal must be valid poses");
  PlanResult result;
  EdgeValidator edges(checker, cloud, params);
  if (!edges.pose_free(start)) {
    result.status = PlanStatus::start_in_collision;
    return result;
  }
  if (!edges.pose_free(goal)) {
    result.status = PlanStatus::goal_in_collision;
    return result;
  }
  Rng rng(params.seed);
  if (edges.edge_free(start, goal, false)) {
    result.status = PlanStatus::success;
    result.path = {start, goal};
    return result;
  }

  const double cell = std::max(params.step_size, 1e-3);
  detail::Tree ta(start, cell, params.rotation_weight), tb(goal, cell, params.rotation_weight);
  detail::Tree* a = &ta;
  detail::Tree* b = &tb;
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    result.iterations = it + 1;
    Pose sample;
    if (rng.uniform() < params.goal_bias) {
      sample = b->nodes[0];
    } else {
      sample.translation = rng.uniform(bounds.min, bounds.max);
      sample.rotation = rng.rotation();
    }
    std::size_t new_a = 0;
    if (detail::extend(*a, sample, edges, params, new_a) != detail::Extend::trapped) {
      const Pose target = a->nodes[new_a];
      std::size_t new_b = 0;
      detail::Extend s = detail::Extend::advanced;
      while (s == detail::Extend::advanced) s = detail::extend(*b, target, edges, params, new_b);
      if (s == detail::Extend::reached) {
        auto from_a = a->branch(new_a);
        auto from_b = b->branch(new_b);
        std::reverse(from_a.begin(), from_a.end());
        from_a.insert(from_a.end(), from_b.begin() + 1, from_b.end());
        if (a != &ta) std::reverse(from_a.begin(), from_a.end());
        result.path = std::move(from_a);
        result.status = PlanStatus::success;
        result.tree_nodes = ta.nodes.size() + tb.nodes.size();
        shortcut_path(result.path, edges, params.shortcut_attempts, rng);
        return result;
      }
    }
    std::swap(a, b);
  }
  result.tree_nodes = ta.nodes.size() + tb.nodes.size();
  result.status = PlanStatus::no_path;
  return result;
}

inline PlanResult rrt_connect(const World& world, const PointCloud& cloud, const Pose& start, const Pose& goal,
                              const PlannerParams& params = {}) {
  CollisionChecker checker(world);
  return rrt_connect(checker, cloud.points, start, goal, world.bounds, params);
}

}  // namespace asmplan::sim
