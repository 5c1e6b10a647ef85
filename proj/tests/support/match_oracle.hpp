#pragma once

// Factorial brute-force reference for tree matching: enumerate every
// within-class permutation explicitly and compare node part-set families.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "asmplan/graph.hpp"

namespace oracle {

using asmplan::HierarchicalAssemblyGraph;
using asmplan::PartId;
using asmplan::PartSet;

struct Node {
  PartSet parts;
  std::multiset<PartSet> children;
  bool operator<(const Node& o) const { return std::tie(parts, children) < std::tie(o.parts, o.children); }
  bool operator==(const Node& o) const { return parts == o.parts && children == o.children; }
};

inline std::vector<Node> nodes_of(const HierarchicalAssemblyGraph& g, const std::map<PartId, PartId>& sigma) {
  auto map_set = [&](const PartSet& s) {
    PartSet out;
    for (PartId p : s) out.push_back(sigma.count(p) ? sigma.at(p) : p);
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<Node> out;
  for (std::size_t id = 0; id < g.nodes.size(); ++id) {
    if (g.nodes[id].children.empty()) continue;
    Node n{map_set(g.nodes[id].part_set), {}};
    for (auto c : g.nodes[id].children) n.children.insert(map_set(g.nodes[c].part_set));
    out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Every product of per-class permutations, as explicit maps.
inline std::vector<std::map<PartId, PartId>> all_relabelings(const std::vector<PartSet>& classes) {
  std::vector<std::map<PartId, PartId>> out{{}};
  for (const auto& cls : classes) {
    std::vector<std::map<PartId, PartId>> next;
    std::vector<std::size_t> perm(cls.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::vector<std::vector<std::size_t>> perms;
    // Heap's algorithm, so the enumeration does not share code with the library.
    std::function<void(std::size_t)> heap = [&](std::size_t k) {
      if (k == 1) {
        perms.push_back(perm);
        return;
      }
      for (std::size_t i = 0; i < k; ++i) {
        heap(k - 1);
        std::swap(perm[k % 2 == 0 ? i : 0], perm[k - 1]);
      }
    };
    heap(perm.size());
    for (const auto& base : out)
      for (const auto& p : perms) {
        auto m = base;
        for (std::size_t i = 0; i < cls.size(); ++i) m[cls[i]] = cls[p[i]];
        next.push_back(m);
      }
    out = std::move(next);
  }
  return out;
}

struct Scores {
  bool exact = false;
  double simple_p = 0, simple_r = 0, hard_p = 0, hard_r = 0;
};

inline Scores brute_force(const HierarchicalAssemblyGraph& pred, const HierarchicalAssemblyGraph& gt,
                          const std::vector<PartSet>& classes) {
  Scores s;
  const auto gt_nodes = nodes_of(gt, {});
  std::set<PartSet> gt_sets;
  for (const auto& n : gt_nodes) gt_sets.insert(n.parts);
  std::size_t best_simple = 0, best_hard = 0;
  for (const auto& sigma : all_relabelings(classes)) {
    auto pn = nodes_of(pred, sigma);
    if (pn == gt_nodes) s.exact = true;
    std::size_t simple = 0, hard = 0;
    for (const auto& n : pn) {
      if (gt_sets.count(n.parts)) ++simple;
      if (std::find(gt_nodes.begin(), gt_nodes.end(), n) != gt_nodes.end()) ++hard;
    }
    best_simple = std::max(best_simple, simple);
    best_hard = std::max(best_hard, hard);
  }
  // node part sets are distinct within a tree, so a matched predicted node
  // matches exactly one ground-truth node
  const double np = double(nodes_of(pred, {}).size()), ng = double(gt_nodes.size());
  s.simple_p = best_simple / np;
  s.simple_r = best_simple / ng;
  s.hard_p = best_hard / np;
  s.hard_r = best_hard / ng;
  return s;
}

}  // namespace oracle
