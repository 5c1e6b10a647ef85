#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/random.hpp"

namespace asmplan {

/// Undirected adjacency declaring which parts physically connect.
class Connectivity {
 public:
  Connectivity() = default;

  Connectivity(const PartSet& parts, const std::vector<std::pair<PartId, PartId>>& edges) {
    for (PartId p : parts) adjacency_[p];
    for (const auto& [a, b] : edges) {
      if (a == b) continue;
      adjacency_[a].insert(b);
      adjacency_[b].insert(a);
    }
  }

  PartSet parts() const {
    PartSet out;
    for (const auto& [p, _] : adjacency_) out.push_back(p);
    return out;
  }

  const std::set<PartId>& neighbours(PartId p) const {
    static const std::set<PartId> none;
    auto it = adjacency_.find(p);
    return it == adjacency_.end() ? none : it->second;
  }

  bool connected(PartId a, PartId b) const { return neighbours(a).count(b) > 0; }

  /// True iff `subset` is non-empty and connected in the induced subgraph.
  bool is_connected(const PartSet& subset) const {
    if (subset.empty()) return false;
    std::set<PartId> members(subset.begin(), subset.end());
    std::set<PartId> seen{subset.front()};
    std::vector<PartId> stack{subset.front()};
    while (!stack.empty()) {
      PartId p = stack.back();
      stack.pop_back();
      for (PartId q : neighbours(p))
        if (members.count(q) && seen.insert(q).second) stack.push_back(q);
    }
    return seen.size() == members.size();
  }

 private:
  std::map<PartId, std::set<PartId>> adjacency_;
};

/// m connected parts split into n connected, disjoint groups.
struct SubassemblySpec {
  PartSet selected;
  std::vector<PartSet> grouping;  // sorted by smallest part
};

/// Empty when `spec` satisfies every invariant, otherwise a description.
inline std::string check_subassembly(const SubassemblySpec& spec, const Connectivity& connectivity) {
  if (!connectivity.is_connected(spec.selected)) return "selected parts are not connected";
  std::vector<PartId> all;
  for (const auto& group : spec.grouping) {
    if (!connectivity.is_connected(group)) return "group " + to_string(group) + " is not connected";
    all.insert(all.end(), group.begin(), group.end());
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) return "groups overlap";
  if (PartSet(all) != spec.selected) return "groups do not cover the selection";
  return {};
}

inline constexpr std::size_t kSubassemblyAttempts = 10'000;

/// Draws a connected m-part selection by randomized frontier growth from a
/// random start part (rejecting starts whose component is too small, at most
/// kSubassemblyAttempts times), then partitions it into n connected groups by
/// cutting n-1 random edges of a random spanning tree of the selection.
/// Deterministic for a given seed; throws Infeasible when no selection exists.
inline SubassemblySpec sample_subassembly(const Connectivity& connectivity, std::size_t m, std::size_t n,
                                          std::uint64_t seed) {
  const PartSet parts = connectivity.parts();
  if (m == 0 || m > parts.size()) throw Infeasible("cannot select " + std::to_string(m) + " of " + std::to_string(parts.size()) + " parts");
  if (n == 0 || n > m) throw Infeasible("group count must satisfy 1 <= n <= m");
  Rng rng(seed);

  PartSet selected;
  for (std::size_t attempt = 0; attempt < kSubassemblyAttempts && selected.empty(); ++attempt) {
    std::set<PartId> chosen{parts[rng.index(parts.size())]};
    std::set<PartId> frontier;
    for (PartId q : connectivity.neighbours(*chosen.begin())) frontier.insert(q);
    while (chosen.size() < m && !frontier.empty()) {
      auto it = frontier.begin();
      std::advance(it, static_cast<long>(rng.index(frontier.size())));
      PartId next = *it;
      frontier.erase(it);
      chosen.insert(next);
      for (PartId q : connectivity.neighbours(next))
        if (!chosen.count(q)) frontier.insert(q);
    }
    if (chosen.size() == m) selected.assign(chosen.begin(), chosen.end());
  }
  if (selected.empty())
    throw Infeasible("no connected subset of " + std::to_string(m) + " parts after " +
                     std::to_string(kSubassemblyAttempts) + " attempts");

  // Random spanning tree via Kruskal over shuffled induced edges.
  std::vector<std::pair<PartId, PartId>> edges;
  for (PartId a : selected)
    for (PartId b : connectivity.neighbours(a))
      if (a < b && std::binary_search(selected.begin(), selected.end(), b)) edges.emplace_back(a, b);
  rng.shuffle(edges);
  std::map<PartId, PartId> parent;
  for (PartId p : selected) parent[p] = p;
  auto find = [&](PartId p) {
    while (parent[p] != p) p = parent[p] = parent[parent[p]];
    return p;
  };
  std::vector<std::pair<PartId, PartId>> tree;
  for (const auto& [a, b] : edges) {
    PartId ra = find(a), rb = find(b);
    if (ra == rb) continue;
    parent[std::max(ra, rb)] = std::min(ra, rb);
    tree.emplace_back(a, b);
  }

  // Keep all but n-1 randomly chosen tree edges.
  rng.shuffle(tree);
  tree.resize(tree.size() - (n - 1));
  for (PartId p : selected) parent[p] = p;
  for (const auto& [a, b] : tree) {
    PartId ra = find(a), rb = find(b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<PartId, std::vector<PartId>> groups;
  for (PartId p : selected) groups[find(p)].push_back(p);

  SubassemblySpec spec;
  spec.selected = selected;
  for (auto& [root, members] : groups) spec.grouping.push_back(make_part_set(std::move(members)));
  return spec;
}

}  // namespace asmplan
