#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

/// {"q":[w,x,y,z],"t":[x,y,z]}
inline nlohmann::json pose_to_json(const Pose& p) {
  return {{"q", {p.rotation.w(), p.rotation.x(), p.rotation.y(), p.rotation.z()}},
          {"t", {p.translation.x(), p.translation.y(), p.translation.z()}}};
}

inline Pose pose_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("q") || !j.contains("t")) throw ParseError("pose needs \"q\" and \"t\"");
  const auto& q = j.at("q");
  const auto& t = j.at("t");
  if (!q.is_array() || q.size() != 4 || !t.is_array() || t.size() != 3)
    throw ParseError("pose \"q\" must have 4 and \"t\" 3 numbers");
  Pose p;
  p.rotation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  const double norm = p.rotation.norm();
  if (!(norm > 0.0)) throw ParseError("pose quaternion has zero norm");
  p.rotation.normalize();
  p.translation = Vec3(t[0].get<double>(), t[1].get<double>(), t[2].get<double>());
  return p;
}

/// Pose maps keyed by part id: {"0": {...}, "1": {...}}.
inline std::map<PartId, Pose> pose_map_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("pose map must be a JSON object keyed by part id");
  std::map<PartId, Pose> out;
  for (const auto& [key, value] : j.items()) {
    std::size_t used = 0;
    long long id = 0;
    try {
      id = std::stoll(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || id < 0) throw ParseError("pose map key '" + key + "' is not a part id");
    out.emplace(PartId{id}, pose_from_json(value));
  }
  return out;
}

inline nlohmann::json pose_map_to_json(const std::map<PartId, Pose>& poses) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [part, pose] : poses) j[std::to_string(part.value)] = pose_to_json(pose);
  return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace asmplan
