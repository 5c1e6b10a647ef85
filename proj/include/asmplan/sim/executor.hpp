#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/metrics.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/orders.hpp"
#include "asmplan/sim/rrt_connect.hpp"
#include "asmplan/sim/world.hpp"

namespace asmplan::sim {

enum class StepStatus { success, pose_too_far, no_path, floating_part };

inline const char* to_string(StepStatus s) {
  switch (s) {
    case StepStatus::success: return "success";
    case StepStatus::pose_too_far: return "pose_too_far";
    case StepStatus::no_path: return "no_path";
    case StepStatus::floating_part: return "floating_part";
  }
  return "unknown";
}

inline StepStatus step_status_from_string(const std::string& s) {
  for (StepStatus v : {StepStatus::success, StepStatus::pose_too_far, StepStatus::no_path, StepStatus::floating_part})
    if (s == to_string(v)) return v;
  throw ParseError("unknown step status '" + s + "'");
}

struct StepOutcome {
  std::size_t step_index = 0;  // 1-based position in the order
  NodeId node = 0;
  StepStatus status = StepStatus::success;
  std::vector<PartId> moved;
  /// One path per moved part; present iff status == success.
  std::optional<std::map<PartId, std::vector<Pose>>> paths;
  std::string detail;
};

struct ExecutionParams {
  double max_translation_error = 0.05;                    // m
  double max_rotation_error = 15.0 * std::numbers::pi / 180.0;  // rad
  double attachment_distance = 0.01;                      // m
  PlannerParams planner;
};

/// Everything a trial needs besides the plan itself.
struct AssemblyScene {
  World world;                              // static obstacles only
  std::map<PartId, PointCloud> clouds;      // local frames
  std::map<PartId, Pose> initial;           // where parts lie before assembly
  std::map<PartId, Pose> ground_truth;      // assembled poses
};

struct TrialResult {
  std::vector<StepOutcome> outcomes;
  std::size_t total_steps = 0;

  std::size_t steps_completed() const {
    std::size_t n = 0;
    for (const auto& o : outcomes)
      if (o.status == StepStatus::success) ++n;
    return n;
  }
  bool success() const { return total_steps > 0 && steps_completed() == total_steps; }
  std::optional<StepStatus> failure() const {
    for (const auto& o : outcomes)
      if (o.status != StepStatus::success) return o.status;
    return std::nullopt;
  }
};

/// Runs the plan step by step. In each step the step's atomic children move
/// from their initial poses to their targets, in ascending part id;
/// subassemblies built by earlier steps stay where they are. A step fails
///  - pose_too_far when a moved part's target is beyond the translation or
///    rotation tolerance from its ground-truth pose,
///  - no_path when the planner cannot reach the target (including a target
///    already in collision),
///  - floating_part when a moved part ends farther than attachment_distance
///    from every other component of the step.
/// Execution stops at the first failing step. Parts not yet moved are
/// obstacles at their initial poses.
inline TrialResult execute_assembly(const HierarchicalAssemblyGraph& graph, const AssemblyOrder& order,
                                    const std::map<PartId, Pose>& targets, const AssemblyScene& scene,
                                    const ExecutionParams& params = {}) {
  if (!is_feasible_order(graph, order)) throw InvalidArgument("assembly order is not feasible for the graph");
  for (PartId p : graph.parts()) {
    if (!targets.count(p)) throw InvalidArgument("missing target pose for part " + std::to_string(p.value));
    if (!scene.clouds.count(p)) throw InvalidArgument("missing cloud for part " + std::to_string(p.value));
    if (!scene.initial.count(p)) throw InvalidArgument("missing initial pose for part " + std::to_string(p.value));
  }

  TrialResult result;
  result.total_steps = order.sequence.size();
  World world = scene.world;
  for (PartId p : graph.parts()) world.placed[p] = PlacedComponent{scene.clouds.at(p), scene.initial.at(p)};

  for (std::size_t k = 0; k < order.sequence.size(); ++k) {
    const NodeId node = order.sequence[k];
    const GraphNode& n = graph.node(node);
    StepOutcome step;
    step.step_index = k + 1;
    step.node = node;
    for (NodeId c : n.children)
      if (graph.node(c).is_leaf()) step.moved.push_back(graph.node(c).part_set.front());
    std::sort(step.moved.begin(), step.moved.end());

    auto finish = [&](StepStatus s, std::string why) {
      step.status = s;
      step.detail = std::move(why);
      result.outcomes.push_back(step);
    };

    std::string too_far;
    for (PartId p : step.moved) {
      auto gt = scene.ground_truth.find(p);
      if (gt == scene.ground_truth.end()) continue;
      const Pose& t = targets.at(p);
      const double dt = (t.translation - gt->second.translation).norm();
      const double dr = geodesic_distance(t.rotation, gt->second.rotation);
      if (dt > params.max_translation_error || dr > params.max_rotation_error) {
        too_far = "part " + std::to_string(p.value) + " target off by " + std::to_string(dt) + " m, " +
                  std::to_string(dr * 180.0 / std::numbers::pi) + " deg";
        break;
      }
    }
    if (!too_far.empty()) {
      finish(StepStatus::pose_too_far, too_far);
      break;
    }

    std::map<PartId, std::vector<Pose>> paths;
    std::string planning_failure;
    for (PartId p : step.moved) {
      CollisionChecker checker(world, p);
      PlannerParams pp = params.planner;
      pp.seed = params.planner.seed + 7919 * k + static_cast<std::uint64_t>(p.value);
      const PlanResult plan = rrt_connect(checker, scene.clouds.at(p).points, world.placed.at(p).pose, targets.at(p), world.bounds, pp);
      if (!plan.ok()) {
        planning_failure = "part " + std::to_string(p.value) + ": " + to_string(plan.status);
        break;
      }
      paths[p] = plan.path;
      world = world.with_placed(p, scene.clouds.at(p), targets.at(p));
    }
    if (!planning_failure.empty()) {
      finish(StepStatus::no_path, planning_failure);
      break;
    }

    std::string floating;
    for (PartId p : step.moved) {
      const auto mine = transform_points(targets.at(p), scene.clouds.at(p).points);
      std::vector<Vec3> rest;
      for (NodeId c : n.children)
        for (PartId q : graph.node(c).part_set) {
          if (q == p) continue;
          const auto& pc = world.placed.at(q);
          for (const auto& x : pc.cloud.points) rest.push_back(pc.pose.apply(x));
        }
      const double gap = rest.empty() ? 0.0 : min_distance(mine, rest);
      if (gap > params.attachment_distance) {
        floating = "part " + std::to_string(p.value) + " is " + std::to_string(gap) + " m from the rest of the step";
        break;
      }
    }
    if (!floating.empty()) {
      finish(StepStatus::floating_part, floating);
      break;
    }
    step.paths = std::move(paths);
    finish(StepStatus::success, {});
  }
  return result;
}

/// Mean over trials of steps completed / total steps.
inline double acr(const std::vector<std::pair<std::size_t, std::size_t>>& trials) {
  if (trials.empty()) throw InvalidArgument("ACR of zero trials");
  double sum = 0.0;
  for (const auto& [done, total] : trials) {
    if (total == 0 || done > total) throw InvalidArgument("ACR trial needs 0 <= completed <= total and total > 0");
    sum += static_cast<double>(done) / static_cast<double>(total);
  }
  return sum / static_cast<double>(trials.size());
}

inline double acr(const std::vector<TrialResult>& trials) {
  std::vector<std::pair<std::size_t, std::size_t>> counts;
  for (const auto& t : trials) counts.emplace_back(t.steps_completed(), t.total_steps);
  return acr(counts);
}

/// Fraction of trials in which every step succeeded.
inline double success_rate(const std::vector<TrialResult>& trials) {
  if (trials.empty()) throw InvalidArgument("success rate of zero trials");
  std::size_t ok = 0;
  for (const auto& t : trials) ok += t.success() ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(trials.size());
}

}  // namespace asmplan::sim
