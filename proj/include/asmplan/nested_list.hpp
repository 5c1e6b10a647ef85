#pragma once

#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

namespace detail {

class NestedListParser {
 public:
  explicit NestedListParser(std::string_view text) : text_(text) {}

  HierarchicalAssemblyGraph parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty nested list", pos_);
    if (text_[pos_] != '[') throw ParseError("nested list must start with '['", pos_);
    graph_.root = parse_list();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("unexpected trailing characters", pos_);
    return std::move(graph_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  NodeId parse_list() {
    const std::size_t open = pos_;
    ++pos_;  // '['
    NodeId id = graph_.nodes.size();
    graph_.nodes.emplace_back();
    std::vector<NodeId> children;
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == ']') throw ParseError("empty list", open);
    bool after_list = false;
    while (true) {
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ']'", open);
      char c = text_[pos_];
      NodeId child;
      if (c == '[') {
        child = parse_list();
        after_list = true;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        child = parse_leaf();
        after_list = false;
      } else {
        throw ParseError(std::string("unexpected token '") + c + "'", pos_);
      }
      children.push_back(child);
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError("unbalanced brackets: missing ']'", open);
      c = text_[pos_];
      if (c == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ']') throw ParseError("trailing comma", pos_);
        continue;
      }
      if (c == ']') {
        ++pos_;
        break;
      }
      // A closing bracket directly followed by the next element is accepted
      // without a comma; VLM output occasionally drops it.
      if (after_list && (c == '[' || std::isdigit(static_cast<unsigned char>(c)))) continue;
      throw ParseError(std::string("expected ',' or ']' but found '") + c + "'", pos_);
    }
    std::vector<PartId> parts;
    for (NodeId ch : children)
      parts.insert(parts.end(), graph_.nodes[ch].part_set.begin(), graph_.nodes[ch].part_set.end());
    graph_.nodes[id].children = std::move(children);
    graph_.nodes[id].part_set = make_part_set(std::move(parts));
    return id;
  }

  NodeId parse_leaf() {
    const std::size_t start = pos_;
    std::int64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (value > (INT64_MAX - 9) / 10) throw ParseError("integer out of range", start);
      value = value * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      throw ParseError("non-integer token", start);
    PartId part{value};
    if (!seen_.insert(part).second)
      throw ParseError("duplicate part " + std::to_string(value), start);
    NodeId id = graph_.nodes.size();
    graph_.nodes.push_back(GraphNode{{part}, {}, std::nullopt});
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  HierarchicalAssemblyGraph graph_;
  std::set<PartId> seen_;
};

}  // namespace detail

/// Parses the bracketed integer grammar, e.g. "[[[[1,5],2],7],3,4]".
/// Integers become leaves, each bracket level a non-leaf node, the outermost
/// list the root. Node ids follow preorder. Throws ParseError on syntax errors
/// and duplicate integers. Single-element lists parse; `validate` flags them.
inline HierarchicalAssemblyGraph parse_nested_list(std::string_view text,
                                                   std::vector<EquivalencePair> equivalences = {}) {
  auto g = detail::NestedListParser(text).parse();
  g.equivalences = std::move(equivalences);
  // Step indices follow a post-order walk so children precede parents.
  std::vector<NodeId> post;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    for (NodeId c : g.nodes[id].children) walk(c);
    if (!g.nodes[id].is_leaf()) post.push_back(id);
  };
  walk(g.root);
  for (std::size_t i = 0; i < post.size(); ++i) g.nodes[post[i]].step_index = static_cast<int>(i + 1);
  return g;
}

/// Serializes a valid graph; children are emitted in ascending order of their
/// smallest part id, so the output is the canonical form.
inline std::string to_nested_list(const HierarchicalAssemblyGraph& g) { return canonical_form(g); }

}  // namespace asmplan
