#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/random.hpp"

namespace asmplan {

/// Flat one-level tree: a root whose children are all parts.
inline HierarchicalAssemblyGraph singlestep_baseline(const PartSet& parts) {
  const PartSet sorted = make_part_set(parts);
  if (sorted.size() < 2) throw InvalidArgument("SingleStep baseline needs at least 2 parts");
  HierarchicalAssemblyGraph g;
  g.nodes.push_back(GraphNode{sorted, {}, 1});
  g.root = 0;
  for (PartId p : sorted) {
    g.nodes[0].children.push_back(g.nodes.size());
    g.nodes.push_back(GraphNode{{p}, {}, std::nullopt});
  }
  return g;
}

/// A part with its cloud (local frame) and predicted pose.
struct PosedPart {
  PartId id;
  PointCloud cloud;
  Pose pose;
};

struct NearestPartOptions {
  /// Start part; defaults to the lowest id.
  std::optional<PartId> seed_part;
  /// When set (and no seed_part), the start part is drawn with this RNG seed.
  std::optional<std::uint64_t> random_seed;
};

/// Greedy heuristic order: start from a seed part, then repeatedly append the
/// part whose posed centroid is nearest to any already assembled part. Ties go
/// to the lower part id.
inline std::vector<PartId> nearest_part_order(const std::vector<PosedPart>& parts, const NearestPartOptions& options = {}) {
  if (parts.empty()) throw InvalidArgument("nearest-part order of an empty part list");
  std::vector<std::size_t> idx(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return parts[a].id < parts[b].id; });
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (parts[idx[i]].id == parts[idx[i - 1]].id) throw InvalidArgument("duplicate part id in nearest-part order");

  std::vector<Vec3> centres(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) centres[i] = parts[i].pose.apply(centroid(parts[i].cloud.points));

  std::size_t start = idx.front();
  if (options.seed_part) {
    auto it = std::find_if(parts.begin(), parts.end(), [&](const PosedPart& p) { return p.id == *options.seed_part; });
    if (it == parts.end()) throw InvalidArgument("seed part " + std::to_string(options.seed_part->value) + " not found");
    start = static_cast<std::size_t>(it - parts.begin());
  } else if (options.random_seed) {
    Rng rng(*options.random_seed);
    start = idx[rng.index(idx.size())];
  }

  std::vector<char> used(parts.size(), 0);
  std::vector<double> dist(parts.size(), std::numeric_limits<double>::infinity());
  std::vector<PartId> order;
  std::size_t current = start;
  while (true) {
    used[current] = 1;
    order.push_back(parts[current].id);
    if (order.size() == parts.size()) break;
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (!used[i]) dist[i] = std::min(dist[i], (centres[i] - centres[current]).norm());
    std::size_t best = parts.size();
    for (std::size_t i : idx) {
      if (used[i]) continue;
      if (best == parts.size() || dist[i] < dist[best]) best = i;
    }
    current = best;
  }
  return order;
}

}  // namespace asmplan
