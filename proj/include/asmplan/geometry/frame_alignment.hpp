#pragma once

#include <map>

#include "asmplan/geometry/pose.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

/// Transform from the manual (camera) frame to the world frame, solved from
/// one anchor part observed in both: world = result * manual.
inline Pose solve_frame_alignment(const Pose& anchor_world, const Pose& anchor_manual) {
  return compose(anchor_world, invert(anchor_manual));
}

inline std::map<PartId, Pose> map_targets_to_world(const Pose& alignment, const std::map<PartId, Pose>& manual_targets) {
  std::map<PartId, Pose> out;
  for (const auto& [part, pose] : manual_targets) out.emplace(part, compose(alignment, pose));
  return out;
}

}  // namespace asmplan
