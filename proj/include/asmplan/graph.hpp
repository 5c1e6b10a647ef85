#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "asmplan/error.hpp"

namespace asmplan {

/// Label of an atomic part, matching the numeric marks on the pre-assembly scene.
struct PartId {
  std::int64_t value = 0;

  constexpr PartId() = default;
  constexpr explicit PartId(std::int64_t v) : value(v) {}

  friend constexpr auto operator<=>(PartId, PartId) = default;
  friend std::ostream& operator<<(std::ostream& os, PartId p) { return os << p.value; }
};

/// Sorted, duplicate-free list of part ids.
using PartSet = std::vector<PartId>;
using NodeId = std::size_t;
using EquivalencePair = std::pair<PartId, PartId>;

inline PartSet make_part_set(std::vector<PartId> parts) {
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  return parts;
}

inline PartSet make_part_set(std::initializer_list<std::int64_t> values) {
  std::vector<PartId> parts;
  for (auto v : values) parts.emplace_back(v);
  return make_part_set(std::move(parts));
}

inline std::string to_string(const PartSet& parts) {
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(parts[i].value);
  }
  return out + "}";
}

struct GraphNode {
  PartSet part_set;
  std::vector<NodeId> children;     // empty iff leaf
  std::optional<int> step_index;    // manual image index for non-leaf nodes

  bool is_leaf() const noexcept { return children.empty(); }
};

/// Nodes over part sets, child->parent assembly edges (implied by `children`)
/// and undirected equivalence edges between parts. Node ids are indices into
/// `nodes`.
struct HierarchicalAssemblyGraph {
  std::vector<GraphNode> nodes;
  NodeId root = 0;
  std::vector<EquivalencePair> equivalences;

  const GraphNode& node(NodeId id) const { return nodes.at(id); }

  /// Union of the part sets of all leaves, sorted.
  PartSet parts() const {
    std::vector<PartId> all;
    for (const auto& n : nodes)
      if (n.is_leaf()) all.insert(all.end(), n.part_set.begin(), n.part_set.end());
    return make_part_set(std::move(all));
  }

  /// Non-leaf node ids reachable from the root, in preorder.
  std::vector<NodeId> non_leaf_nodes() const {
    std::vector<NodeId> out;
    preorder([&](NodeId id) {
      if (!nodes[id].is_leaf()) out.push_back(id);
    });
    return out;
  }

  std::vector<NodeId> leaf_nodes() const {
    std::vector<NodeId> out;
    preorder([&](NodeId id) {
      if (nodes[id].is_leaf()) out.push_back(id);
    });
    return out;
  }

  /// Parent of every node reachable from the root (root maps to nullopt).
  std::vector<std::optional<NodeId>> parents() const {
    std::vector<std::optional<NodeId>> out(nodes.size());
    preorder([&](NodeId id) {
      for (NodeId c : nodes[id].children)
        if (c < nodes.size()) out[c] = id;
    });
    return out;
  }

  /// Preorder traversal from the root. Guards against cycles and dangling ids,
  /// so it is safe to call on graphs that have not been validated.
  template <typename Visit>
  void preorder(Visit&& visit) const {
    if (root >= nodes.size()) return;
    std::vector<char> seen(nodes.size(), 0);
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (seen[id]) continue;
      seen[id] = 1;
      visit(id);
      const auto& ch = nodes[id].children;
      for (auto it = ch.rbegin(); it != ch.rend(); ++it)
        if (*it < nodes.size() && !seen[*it]) stack.push_back(*it);
    }
  }
};

enum class ViolationKind {
  bad_root,
  unknown_child,
  multiple_parents,
  cycle,
  unreachable_node,
  leaf_part_count,
  single_child,
  overlapping_children,
  union_mismatch,
  duplicate_leaf_part,
  root_part_set,
  unknown_equivalence_part,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::bad_root: return "bad root";
    case ViolationKind::unknown_child: return "unknown child";
    case ViolationKind::multiple_parents: return "multiple parents";
    case ViolationKind::cycle: return "cycle";
    case ViolationKind::unreachable_node: return "unreachable node";
    case ViolationKind::leaf_part_count: return "leaf part count";
    case ViolationKind::single_child: return "non-leaf with one child";
    case ViolationKind::overlapping_children: return "overlapping children";
    case ViolationKind::union_mismatch: return "union mismatch";
    case ViolationKind::duplicate_leaf_part: return "duplicate leaf part";
    case ViolationKind::root_part_set: return "root part set";
    case ViolationKind::unknown_equivalence_part: return "unknown equivalence part";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::optional<NodeId> node;
  std::string message;
};

/// Returns every violated structural invariant; an empty list means the graph
/// is a valid hierarchical assembly graph.
inline std::vector<Violation> validate(const HierarchicalAssemblyGraph& g) {
  std::vector<Violation> out;
  const std::size_t n = g.nodes.size();
  auto node_msg = [](NodeId id, const std::string& text) {
    return "node " + std::to_string(id) + ": " + text;
  };

  if (g.root >= n) {
    out.push_back({ViolationKind::bad_root, std::nullopt,
                   "root id " + std::to_string(g.root) + " is not a node"});
    return out;
  }

  std::vector<int> parent_count(n, 0);
  for (NodeId id = 0; id < n; ++id) {
    for (NodeId c : g.nodes[id].children) {
      if (c >= n) {
        out.push_back({ViolationKind::unknown_child, id,
                       node_msg(id, "child id " + std::to_string(c) + " does not exist")});
        continue;
      }
      ++parent_count[c];
    }
  }
  for (NodeId id = 0; id < n; ++id) {
    if (parent_count[id] > 1)
      out.push_back({ViolationKind::multiple_parents, id,
                     node_msg(id, "has " + std::to_string(parent_count[id]) + " parents")});
  }
  if (parent_count[g.root] > 0)
    out.push_back({ViolationKind::bad_root, g.root, node_msg(g.root, "root has a parent")});

  // Cycle detection by iterative DFS colouring from every node.
  {
    std::vector<int> colour(n, 0);  // 0 white, 1 on stack, 2 done
    for (NodeId start = 0; start < n; ++start) {
      if (colour[start]) continue;
      std::vector<std::pair<NodeId, std::size_t>> stack{{start, 0}};
      colour[start] = 1;
      while (!stack.empty()) {
        auto& [id, next] = stack.back();
        const auto& ch = g.nodes[id].children;
        if (next < ch.size()) {
          NodeId c = ch[next++];
          if (c >= n) continue;
          if (colour[c] == 1) {
            out.push_back({ViolationKind::cycle, c, node_msg(c, "lies on a cycle")});
          } else if (colour[c] == 0) {
            colour[c] = 1;
            stack.push_back({c, 0});
          }
        } else {
          colour[id] = 2;
          stack.pop_back();
        }
      }
    }
  }

  std::vector<char> reachable(n, 0);
  g.preorder([&](NodeId id) { reachable[id] = 1; });
  for (NodeId id = 0; id < n; ++id)
    if (!reachable[id])
      out.push_back({ViolationKind::unreachable_node, id, node_msg(id, "is not reachable from the root")});

  std::map<PartId, std::vector<NodeId>> leaf_owner;
  for (NodeId id = 0; id < n; ++id) {
    if (!reachable[id]) continue;
    const auto& node = g.nodes[id];
    const PartSet own = make_part_set(node.part_set);
    if (node.is_leaf()) {
      if (own.size() != 1)
        out.push_back({ViolationKind::leaf_part_count, id,
                       node_msg(id, "leaf holds " + std::to_string(own.size()) + " parts")});
      for (PartId p : own) leaf_owner[p].push_back(id);
      continue;
    }
    if (node.children.size() == 1)
      out.push_back({ViolationKind::single_child, id, node_msg(id, "non-leaf with one child")});

    std::vector<PartId> unioned;
    bool overlap = false;
    for (NodeId c : node.children) {
      if (c >= n) continue;
      for (PartId p : make_part_set(g.nodes[c].part_set)) unioned.push_back(p);
    }
    std::sort(unioned.begin(), unioned.end());
    if (std::adjacent_find(unioned.begin(), unioned.end()) != unioned.end()) overlap = true;
    if (overlap)
      out.push_back({ViolationKind::overlapping_children, id,
                     node_msg(id, "children part sets are not disjoint")});
    PartSet child_union = make_part_set(std::move(unioned));
    if (child_union != own)
      out.push_back({ViolationKind::union_mismatch, id,
                     node_msg(id, "union of children " + to_string(child_union) +
                                      " differs from part set " + to_string(own))});
  }

  for (const auto& [part, owners] : leaf_owner) {
    if (owners.size() > 1)
      out.push_back({ViolationKind::duplicate_leaf_part, owners[1],
                     "part " + std::to_string(part.value) + " appears in " +
                         std::to_string(owners.size()) + " leaves"});
  }

  const PartSet all = g.parts();
  const bool root_reported = std::any_of(out.begin(), out.end(), [&](const Violation& v) {
    return v.kind == ViolationKind::union_mismatch && v.node == g.root;
  });
  if (!root_reported && make_part_set(g.nodes[g.root].part_set) != all)
    out.push_back({ViolationKind::root_part_set, g.root,
                   node_msg(g.root, "root part set " + to_string(make_part_set(g.nodes[g.root].part_set)) +
                                        " differs from full part set " + to_string(all))});

  for (const auto& [a, b] : g.equivalences) {
    for (PartId p : {a, b}) {
      if (!std::binary_search(all.begin(), all.end(), p))
        out.push_back({ViolationKind::unknown_equivalence_part, std::nullopt,
                       "equivalence references unknown part " + std::to_string(p.value)});
    }
  }
  return out;
}

inline bool is_valid(const HierarchicalAssemblyGraph& g) { return validate(g).empty(); }

/// Throws on the first violation. Single-child nodes are only flagged by
/// validate(); they do not make a graph unusable.
inline void require_valid(const HierarchicalAssemblyGraph& g) {
  for (const auto& v : validate(g))
    if (v.kind != ViolationKind::single_child) throw InvalidGraph("invalid assembly graph: " + v.message);
  if (g.parts().size() < 2) throw InvalidGraph("invalid assembly graph: fewer than two parts");
}

/// Partition of a part universe into equivalence classes, obtained as the
/// transitive closure of equivalence pairs.
class EquivalenceClasses {
 public:
  EquivalenceClasses() = default;

  EquivalenceClasses(const PartSet& universe, const std::vector<EquivalencePair>& pairs) {
    std::vector<PartId> all(universe.begin(), universe.end());
    for (const auto& [a, b] : pairs) {
      all.push_back(a);
      all.push_back(b);
    }
    parts_ = make_part_set(std::move(all));
    std::vector<std::size_t> parent(parts_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (const auto& [a, b] : pairs) {
      auto ra = find(index_of(a));
      auto rb = find(index_of(b));
      if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
    }
    std::map<std::size_t, std::vector<PartId>> groups;
    for (std::size_t i = 0; i < parts_.size(); ++i) groups[find(i)].push_back(parts_[i]);
    class_of_.resize(parts_.size());
    for (auto& [root, members] : groups) {
      for (PartId p : members) class_of_[index_of(p)] = classes_.size();
      classes_.push_back(make_part_set(std::move(members)));
    }
  }

  /// Classes sorted by their smallest member; each class is sorted.
  const std::vector<PartSet>& classes() const noexcept { return classes_; }

  /// Smallest member of the class containing `p` (p itself if unknown).
  PartId representative(PartId p) const {
    auto it = std::lower_bound(parts_.begin(), parts_.end(), p);
    if (it == parts_.end() || *it != p) return p;
    return classes_[class_of_[static_cast<std::size_t>(it - parts_.begin())]].front();
  }

  bool equivalent(PartId a, PartId b) const { return representative(a) == representative(b); }

  /// Canonical pair list (a<b, sorted) whose closure yields these classes.
  std::vector<EquivalencePair> pairs() const {
    std::vector<EquivalencePair> out;
    for (const auto& c : classes_)
      for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j) out.emplace_back(c[i], c[j]);
    return out;
  }

  /// Number of within-class relabelings: product of factorials of class sizes.
  /// Saturates at SIZE_MAX.
  std::size_t permutation_count() const {
    std::size_t total = 1;
    for (const auto& c : classes_) {
      for (std::size_t k = 2; k <= c.size(); ++k) {
        if (total > static_cast<std::size_t>(-1) / k) return static_cast<std::size_t>(-1);
        total *= k;
      }
    }
    return total;
  }

 private:
  std::size_t index_of(PartId p) const {
    return static_cast<std::size_t>(std::lower_bound(parts_.begin(), parts_.end(), p) - parts_.begin());
  }

  PartSet parts_;
  std::vector<PartSet> classes_;
  std::vector<std::size_t> class_of_;
};

inline EquivalenceClasses equivalence_classes(const HierarchicalAssemblyGraph& g) {
  return EquivalenceClasses(g.parts(), g.equivalences);
}

namespace detail {

inline std::string canonical_subtree(const HierarchicalAssemblyGraph& g, NodeId id,
                                     const std::function<PartId(PartId)>& label, bool sort_by_text) {
  const auto& node = g.nodes.at(id);
  if (node.is_leaf()) {
    if (node.part_set.size() != 1) throw InvalidGraph("leaf without exactly one part");
    return std::to_string(label(node.part_set.front()).value);
  }
  std::vector<std::pair<PartId, std::string>> parts;
  for (NodeId c : node.children) {
    const auto& cs = g.nodes.at(c).part_set;
    PartId min_part = cs.empty() ? PartId{} : *std::min_element(cs.begin(), cs.end());
    parts.emplace_back(min_part, canonical_subtree(g, c, label, sort_by_text));
  }
  if (sort_by_text)
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  else
    std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ",";
    out += parts[i].second;
  }
  return out + "]";
}

}  // namespace detail

/// Canonical nested-list text: children ordered by their smallest part id.
/// Two graphs are isomorphic iff their canonical forms are equal.
inline std::string canonical_form(const HierarchicalAssemblyGraph& g) {
  require_valid(g);
  return detail::canonical_subtree(g, g.root, [](PartId p) { return p; }, false);
}

/// Canonical form after replacing every part by its class representative.
/// Children are ordered by their own canonical text since representatives may
/// repeat among siblings.
inline std::string class_canonical_form(const HierarchicalAssemblyGraph& g, const EquivalenceClasses& classes) {
  require_valid(g);
  return detail::canonical_subtree(g, g.root, [&](PartId p) { return classes.representative(p); }, true);
}

/// Applies a part relabeling to every part set and equivalence pair.
inline HierarchicalAssemblyGraph relabel(HierarchicalAssemblyGraph g, const std::function<PartId(PartId)>& map) {
  for (auto& n : g.nodes) {
    for (auto& p : n.part_set) p = map(p);
    n.part_set = make_part_set(std::move(n.part_set));
  }
  for (auto& [a, b] : g.equivalences) {
    a = map(a);
    b = map(b);
  }
  return g;
}

}  // namespace asmplan

template <>
struct std::hash<asmplan::PartId> {
  std::size_t operator()(asmplan::PartId p) const noexcept { return std::hash<std::int64_t>{}(p.value); }
};
