#pragma once

#include <filesystem>
#include <numbers>
#include <optional>
#include <string>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/geometry/cloud_io.hpp"
#include "asmplan/geometry/pose_json.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/orders.hpp"
#include "asmplan/sim/executor.hpp"

namespace asmplan::sim {

/// Assembly trial description (see README for the JSON layout).
struct AssemblyScenario {
  std::string name;
  HierarchicalAssemblyGraph graph;
  AssemblyOrder order;
  AssemblyScene scene;
  std::map<PartId, Pose> targets;
  ExecutionParams params;
};

/// Single planning query.
struct PlanScenario {
  std::string name;
  World world;
  PointCloud cloud;
  Pose start, goal;
  PlannerParams params;
  std::optional<PlanStatus> expect;
};

namespace detail {

inline Vec3 vec3_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ParseError(std::string(what) + " must be [x, y, z]");
  Vec3 v;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw ParseError(std::string(what) + " must contain numbers");
    v[k] = j[k].get<double>();
  }
  return v;
}

inline Aabb aabb_from_json(const nlohmann::json& j) {
  Aabb b{vec3_from_json(j.at("min"), "box min"), vec3_from_json(j.at("max"), "box max")};
  if (!(b.min.array() <= b.max.array()).all()) throw ParseError("box min exceeds max");
  return b;
}

/// A cloud given as a file path, {"points": [...]}, or a generated box
/// surface {"box": {"size": [...], "spacing": s, "pose": {...}}}.
inline PointCloud cloud_from_json(const nlohmann::json& j, const std::filesystem::path& base, PartId part = PartId{}) {
  if (j.is_string()) {
    std::filesystem::path p = j.get<std::string>();
    return read_cloud(p.is_absolute() ? p : base / p, part);
  }
  if (j.is_object() && j.contains("points")) {
    PointCloud c;
    c.part = part;
    for (const auto& p : j.at("points")) c.points.push_back(vec3_from_json(p, "point"));
    return c;
  }
  if (j.is_object() && j.contains("box")) {
    const auto& b = j.at("box");
    PointCloud c = make_box_surface_cloud(vec3_from_json(b.at("size"), "box size"), b.value("spacing", 0.01), part);
    if (b.contains("pose")) c = transform_cloud(pose_from_json(b.at("pose")), c);
    c.part = part;
    return c;
  }
  throw ParseError("cloud must be a path, {\"points\": ...} or {\"box\": ...}");
}

inline World world_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  World w;
  if (j.is_null()) return w;
  w.clearance = j.value("clearance", w.clearance);
  if (j.contains("bounds")) w.bounds = aabb_from_json(j.at("bounds"));
  for (const auto& b : j.value("boxes", nlohmann::json::array())) w.boxes.push_back(aabb_from_json(b));
  for (const auto& o : j.value("obstacles", nlohmann::json::array())) w.obstacles.push_back(cloud_from_json(o, base));
  w.check();
  return w;
}

inline PlannerParams planner_from_json(const nlohmann::json& j, PlannerParams p = {}) {
  if (j.is_null()) return p;
  p.step_size = j.value("step_size", p.step_size);
  p.rotation_weight = j.value("rotation_weight", p.rotation_weight);
  p.max_iterations = j.value("max_iterations", p.max_iterations);
  p.goal_bias = j.value("goal_bias", p.goal_bias);
  p.resolution = j.value("resolution", p.resolution);
  p.shortcut_attempts = j.value("shortcut_attempts", p.shortcut_attempts);
  p.seed = j.value("seed", p.seed);
  p.check();
  return p;
}

}  // namespace detail

inline AssemblyScenario assembly_scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  AssemblyScenario s;
  s.name = j.value("name", std::string{});
  if (!j.contains("graph")) throw ParseError("scenario needs a \"graph\"");
  const auto& g = j.at("graph");
  s.graph = parse_nested_list(g.is_string() ? g.get<std::string>() : g.dump());
  require_valid(s.graph);
  s.scene.world = detail::world_from_json(j.value("world", nlohmann::json()), base);
  for (const auto& p : j.at("parts")) {
    PartId id{p.at("id").get<std::int64_t>()};
    s.scene.clouds[id] = detail::cloud_from_json(p.at("cloud"), base, id);
  }
  s.scene.initial = pose_map_from_json(j.at("initial"));
  s.targets = pose_map_from_json(j.at("targets"));
  s.scene.ground_truth = j.contains("ground_truth") ? pose_map_from_json(j.at("ground_truth")) : s.targets;

  if (j.contains("order")) {
    for (const auto& step : j.at("order")) {
      std::vector<PartId> parts;
      for (const auto& v : step) parts.push_back(PartId{v.get<std::int64_t>()});
      const PartSet want = make_part_set(parts);
      std::optional<NodeId> found;
      for (NodeId id : s.graph.non_leaf_nodes())
        if (s.graph.node(id).part_set == want) found = id;
      if (!found) throw ParseError("order step " + to_string(want) + " is not a node of the graph");
      s.order.sequence.push_back(*found);
    }
  } else {
    s.order = feasible_orders(s.graph, 1).orders.at(0);
  }

  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    s.params.max_translation_error = t.value("translation", s.params.max_translation_error);
    if (t.contains("rotation_deg")) s.params.max_rotation_error = t.at("rotation_deg").get<double>() * std::numbers::pi / 180.0;
    s.params.attachment_distance = t.value("attachment", s.params.attachment_distance);
  }
  s.params.planner = detail::planner_from_json(j.value("planner", nlohmann::json()));
  if (j.contains("seed")) s.params.planner.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

inline PlanScenario plan_scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  PlanScenario s;
  s.name = j.value("name", std::string{});
  s.world = detail::world_from_json(j.value("world", nlohmann::json()), base);
  s.cloud = detail::cloud_from_json(j.at("cloud"), base);
  s.start = pose_from_json(j.at("start"));
  s.goal = pose_from_json(j.at("goal"));
  s.params = detail::planner_from_json(j.value("planner", nlohmann::json()));
  if (j.contains("expect")) {
    const std::string e = j.at("expect").get<std::string>();
    for (PlanStatus v : {PlanStatus::success, PlanStatus::start_in_collision, PlanStatus::goal_in_collision, PlanStatus::no_path})
      if (e == to_string(v)) s.expect = v;
    if (!s.expect) throw ParseError("unknown expected plan status '" + e + "'");
  }
  return s;
}

inline AssemblyScenario load_assembly_scenario(const std::filesystem::path& path) {
  return assembly_scenario_from_json(read_json_file(path), path.parent_path());
}

inline PlanScenario load_plan_scenario(const std::filesystem::path& path) {
  return plan_scenario_from_json(read_json_file(path), path.parent_path());
}

/// Runs `trials` independent trials with consecutive planner seeds.
inline std::vector<TrialResult> run_trials(const AssemblyScenario& s, std::size_t trials) {
  std::vector<TrialResult> out;
  for (std::size_t t = 0; t < trials; ++t) {
    ExecutionParams p = s.params;
    p.planner.seed = s.params.planner.seed + t;
    out.push_back(execute_assembly(s.graph, s.order, s.targets, s.scene, p));
  }
  return out;
}

}  // namespace asmplan::sim
