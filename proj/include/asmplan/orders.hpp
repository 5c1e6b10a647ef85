#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

/// Ordered list of non-leaf node ids; every node follows all of its non-leaf
/// children.
struct AssemblyOrder {
  std::vector<NodeId> sequence;

  friend bool operator==(const AssemblyOrder&, const AssemblyOrder&) = default;
};

struct FeasibleOrders {
  std::vector<AssemblyOrder> orders;  // at most `limit`, lexicographic by node id
  std::uint64_t total = 0;            // number of linear extensions
  bool total_saturated = false;       // total exceeded 2^64-1 and was clamped
};

namespace detail {

using u128 = unsigned __int128;

inline bool mul_saturate(std::uint64_t& acc, u128 factor) {
  u128 r = static_cast<u128>(acc) * factor;
  if (r > std::numeric_limits<std::uint64_t>::max()) {
    acc = std::numeric_limits<std::uint64_t>::max();
    return false;
  }
  acc = static_cast<std::uint64_t>(r);
  return true;
}

inline bool binomial(std::uint64_t n, std::uint64_t k, std::uint64_t& out) {
  if (k > n - k) k = n - k;
  u128 c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::uint64_t>::max()) {
      out = std::numeric_limits<std::uint64_t>::max();
      return false;
    }
  }
  out = static_cast<std::uint64_t>(c);
  return true;
}

}  // namespace detail

/// Counts linear extensions of the non-leaf forest: each node interleaves the
/// orders of its children's subtrees, then comes last.
inline std::uint64_t count_feasible_orders(const HierarchicalAssemblyGraph& g, bool* saturated = nullptr) {
  require_valid(g);
  bool ok = true;
  std::vector<std::uint64_t> size(g.nodes.size(), 0), count(g.nodes.size(), 1);
  std::function<void(NodeId)> walk = [&](NodeId id) {
    const auto& node = g.nodes[id];
    if (node.is_leaf()) return;
    std::uint64_t placed = 0;
    std::uint64_t c = 1;
    for (NodeId ch : node.children) {
      walk(ch);
      if (g.nodes[ch].is_leaf()) continue;
      std::uint64_t ways = 0;
      ok &= detail::binomial(placed + size[ch], size[ch], ways);
      ok &= detail::mul_saturate(c, ways);
      ok &= detail::mul_saturate(c, count[ch]);
      placed += size[ch];
    }
    size[id] = placed + 1;
    count[id] = c;
  };
  walk(g.root);
  if (saturated) *saturated = !ok;
  return count[g.root];
}

/// Enumerates up to `limit` feasible assembly orders in lexicographic order of
/// node ids and reports the total count.
inline FeasibleOrders feasible_orders(const HierarchicalAssemblyGraph& g, std::size_t limit) {
  require_valid(g);
  FeasibleOrders result;
  result.total = count_feasible_orders(g, &result.total_saturated);
  if (limit == 0) return result;

  const auto non_leaf = g.non_leaf_nodes();
  std::vector<std::optional<NodeId>> parent = g.parents();
  std::vector<int> pending(g.nodes.size(), 0);  // unplaced non-leaf children
  for (NodeId id : non_leaf)
    for (NodeId c : g.nodes[id].children)
      if (!g.nodes[c].is_leaf()) ++pending[id];

  std::vector<NodeId> available;
  for (NodeId id : non_leaf)
    if (pending[id] == 0) available.push_back(id);
  std::sort(available.begin(), available.end());

  std::vector<NodeId> current;
  std::function<bool()> dfs = [&]() -> bool {
    if (current.size() == non_leaf.size()) {
      result.orders.push_back(AssemblyOrder{current});
      return result.orders.size() < limit;
    }
    const std::vector<NodeId> snapshot = available;
    for (NodeId id : snapshot) {
      available.erase(std::find(available.begin(), available.end(), id));
      current.push_back(id);
      bool unlocked = false;
      NodeId p = 0;
      if (parent[id]) {
        p = *parent[id];
        if (--pending[p] == 0) {
          available.insert(std::lower_bound(available.begin(), available.end(), p), p);
          unlocked = true;
        }
      }
      bool keep_going = dfs();
      if (unlocked) available.erase(std::find(available.begin(), available.end(), p));
      if (parent[id]) ++pending[p];
      current.pop_back();
      available.insert(std::lower_bound(available.begin(), available.end(), id), id);
      if (!keep_going) return false;
    }
    return true;
  };
  dfs();
  return result;
}

/// True iff `order` lists every non-leaf node exactly once, each after all of
/// its non-leaf children. Throws InvalidArgument for ids that are not nodes.
inline bool is_feasible_order(const HierarchicalAssemblyGraph& g, const AssemblyOrder& order) {
  for (NodeId id : order.sequence)
    if (id >= g.nodes.size()) throw InvalidArgument("order references unknown node " + std::to_string(id));
  const auto non_leaf = g.non_leaf_nodes();
  if (order.sequence.size() != non_leaf.size()) return false;
  std::vector<long> position(g.nodes.size(), -1);
  for (std::size_t i = 0; i < order.sequence.size(); ++i) {
    NodeId id = order.sequence[i];
    if (g.nodes[id].is_leaf() || position[id] != -1) return false;
    position[id] = static_cast<long>(i);
  }
  for (NodeId id : non_leaf) {
    if (position[id] < 0) return false;
    for (NodeId c : g.nodes[id].children)
      if (!g.nodes[c].is_leaf() && position[c] > position[id]) return false;
  }
  return true;
}

}  // namespace asmplan
