#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pca.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/vlm/types.hpp"

namespace asmplan::vlm {

namespace detail {

struct Fenced {
  std::size_t begin, end;  // body range
};

// ``` or ''' fenced blocks, with an optional language tag after the opener.
inline std::vector<Fenced> fenced_blocks(std::string_view text) {
  std::vector<Fenced> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t open = std::string_view::npos;
    std::string_view fence;
    for (std::string_view f : {"```", "'''"}) {
      const std::size_t at = text.find(f, i);
      if (at < open) {
        open = at;
        fence = f;
      }
    }
    if (open == std::string_view::npos) break;
    std::size_t body = open + 3;
    while (body < text.size() && (std::isalnum(static_cast<unsigned char>(text[body])) || text[body] == '_')) ++body;
    const std::size_t close = text.find(fence, body);
    if (close == std::string_view::npos) break;
    out.push_back({body, close});
    i = close + 3;
  }
  return out;
}

// End (one past) of the balanced bracket group opening at `open`, skipping
// JSON strings; npos if unbalanced.
inline std::size_t match_bracket(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '[') ++depth;
    else if (c == ']' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

inline std::optional<nlohmann::json> first_json_array(std::string_view text) {
  for (std::size_t i = text.find('['); i != std::string_view::npos; i = text.find('[', i + 1)) {
    const std::size_t end = match_bracket(text, i);
    if (end == std::string_view::npos) continue;
    auto j = nlohmann::json::parse(text.substr(i, end - i), nullptr, false);
    if (!j.is_discarded() && j.is_array()) return j;
  }
  return std::nullopt;
}

inline std::vector<PartId> labels_from_json(const nlohmann::json& j) {
  std::vector<PartId> out;
  auto add_int = [&](std::int64_t v) {
    if (v < 0) throw ParseError("negative label");
    out.push_back(PartId{v});
  };
  auto add_text = [&](const std::string& s) {
    static const std::regex number(R"(\d+)");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), number); it != std::sregex_iterator(); ++it)
      add_int(std::stoll(it->str()));
  };
  if (j.is_number_integer()) add_int(j.get<std::int64_t>());
  else if (j.is_string()) add_text(j.get<std::string>());
  else if (j.is_array()) {
    for (const auto& e : j) {
      if (e.is_number_integer()) add_int(e.get<std::int64_t>());
      else if (e.is_string()) add_text(e.get<std::string>());
      else throw ParseError("label entries must be integers");
    }
  } else {
    throw ParseError("label must be an integer or a list of integers");
  }
  if (out.empty()) throw ParseError("empty label");
  return out;
}

}  // namespace detail

/// Text of a JSON array in `text`: the first fenced block holding one, else
/// the first bracketed span that parses as an array.
inline nlohmann::json extract_json_array(std::string_view text) {
  for (const auto& f : detail::fenced_blocks(text))
    if (auto j = detail::first_json_array(text.substr(f.begin, f.end - f.begin))) return *j;
  if (auto j = detail::first_json_array(text)) return *j;
  throw ParseError("no JSON array found in response");
}

/// Stage I output. Accepts "label" or "number" for the labels and "role",
/// "explanation" or "description" for the role, which may be absent.
inline std::vector<PartTriplet> parse_triplets(std::string_view text) {
  const nlohmann::json arr = extract_json_array(text);
  std::vector<PartTriplet> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& e = arr[i];
    const std::string where = "triplet " + std::to_string(i) + ": ";
    if (!e.is_object()) throw ParseError(where + "expected an object");
    PartTriplet t;
    if (!e.contains("name") || !e.at("name").is_string()) throw ParseError(where + "missing string \"name\"");
    t.name = e.at("name").get<std::string>();
    if (t.name.empty()) throw ParseError(where + "empty name");
    const char* label_key = e.contains("label") ? "label" : e.contains("number") ? "number" : nullptr;
    if (!label_key) throw ParseError(where + "missing \"label\"");
    try {
      t.label = detail::labels_from_json(e.at(label_key));
    } catch (const ParseError& err) {
      throw ParseError(where + err.what());
    }
    for (const char* k : {"role", "explanation", "description"})
      if (e.contains(k)) {
        if (!e.at(k).is_string()) throw ParseError(where + "\"" + k + "\" must be a string");
        t.role = e.at(k).get<std::string>();
        break;
      }
    out.push_back(std::move(t));
  }
  return out;
}

inline nlohmann::json triplets_to_json(const std::vector<PartTriplet>& triplets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : triplets) {
    nlohmann::json labels = nlohmann::json::array();
    for (PartId p : t.label) labels.push_back(p.value);
    arr.push_back({{"name", t.name}, {"label", labels}, {"role", t.role}});
  }
  return arr;
}

/// Lowercase, trimmed, inner whitespace runs collapsed to one space.
inline std::string normalize_text(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

/// Optional geometric check: parts only stay equivalent when their sorted
/// principal extents agree within `tolerance` relative to the larger one.
struct ShapeCheck {
  const std::map<PartId, PointCloud>* clouds = nullptr;
  double tolerance = 0.1;
};

namespace detail {

inline Vec3 sorted_extents(const PointCloud& c) {
  Vec3 e = bounding_box(pca_canonicalize(c).canonical.points).extents();
  std::sort(e.data(), e.data() + 3, std::greater<>());
  return e;
}

inline bool similar_extents(const Vec3& a, const Vec3& b, double tol) {
  for (int k = 0; k < 3; ++k)
    if (std::abs(a[k] - b[k]) > tol * std::max({a[k], b[k], 1e-12})) return false;
  return true;
}

}  // namespace detail

/// Parts whose triplets agree on normalized name and role (or share one
/// triplet) are equivalent. Returns every pair a < b within each class,
/// sorted, so the list is already closed under transitivity.
inline std::vector<EquivalencePair> derive_equivalences(const std::vector<PartTriplet>& triplets,
                                                        const ShapeCheck& shape = {}) {
  std::map<std::pair<std::string, std::string>, std::vector<PartId>> groups;
  for (const auto& t : triplets) {
    auto& g = groups[{normalize_text(t.name), normalize_text(t.role)}];
    g.insert(g.end(), t.label.begin(), t.label.end());
  }
  std::vector<PartSet> classes;
  for (auto& [key, members] : groups) {
    PartSet sorted = make_part_set(members);
    if (!shape.clouds) {
      classes.push_back(std::move(sorted));
      continue;
    }
    // greedy split against each cluster's first member keeps the result a partition
    std::vector<std::pair<Vec3, PartSet>> clusters;
    for (PartId p : sorted) {
      auto it = shape.clouds->find(p);
      if (it == shape.clouds->end()) throw InvalidArgument("shape check: no cloud for part " + std::to_string(p.value));
      const Vec3 e = detail::sorted_extents(it->second);
      bool placed = false;
      for (auto& [ref, members2] : clusters)
        if (detail::similar_extents(ref, e, shape.tolerance)) {
          members2.push_back(p);
          placed = true;
          break;
        }
      if (!placed) clusters.push_back({e, {p}});
    }
    for (auto& c : clusters) classes.push_back(std::move(c.second));
  }
  std::vector<EquivalencePair> out;
  for (const auto& c : classes)
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) out.emplace_back(c[i], c[j]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline std::optional<std::size_t> step_header(const std::string& line) {
  static const std::regex header(R"(^[\s#*]*step\s+(\d+)\b[^a-z]*)", std::regex::icase);
  std::smatch m;
  if (!std::regex_search(line, m, header)) return std::nullopt;
  return static_cast<std::size_t>(std::stoull(m[1].str()));
}

}  // namespace detail

/// Parses a "### Step k:" markdown plan. Parts come from each step's
/// "Parts Needed/Involved" line: integers inside parentheses, e.g. "(3, 4)"
/// or "(0 and 3)", plus "subassembly from Step j" references.
inline std::vector<StepAssignment> parse_step_plan(std::string_view text) {
  static const std::regex parts_line(R"(parts\s+(needed|involved|used|required)\s*:?)", std::regex::icase);
  static const std::regex group(R"(\(([^()]*)\))");
  static const std::regex only_ints(R"(^\s*\d+(\s*(,|and|&)\s*\d+)*\s*,?\s*$)", std::regex::icase);
  static const std::regex integer(R"(\d+)");
  static const std::regex reference(R"(subassembl(y|ies)\s+(from|of)\s+steps?\s+(\d+))", std::regex::icase);

  std::vector<StepAssignment> steps;
  std::vector<bool> have_parts_line;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(text.substr(start, end - start));
    start = end + 1;
    if (auto k = detail::step_header(line)) {
      if (*k != steps.size() + 1)
        throw ParseError("step numbering is not contiguous: expected Step " + std::to_string(steps.size() + 1) +
                         ", found Step " + std::to_string(*k));
      steps.push_back({*k, {}, {}});
      have_parts_line.push_back(false);
      continue;
    }
    if (steps.empty() || have_parts_line.back()) continue;
    std::smatch m;
    if (!std::regex_search(line, m, parts_line)) continue;
    have_parts_line.back() = true;
    const std::string rest = m.suffix().str();
    StepAssignment& s = steps.back();
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), group); it != std::sregex_iterator(); ++it) {
      const std::string inner = (*it)[1].str();
      if (!std::regex_match(inner, only_ints)) continue;
      for (auto n = std::sregex_iterator(inner.begin(), inner.end(), integer); n != std::sregex_iterator(); ++n)
        s.parts.push_back(PartId{std::stoll(n->str())});
    }
    for (auto it = std::sregex_iterator(rest.begin(), rest.end(), reference); it != std::sregex_iterator(); ++it) {
      const std::size_t j = std::stoull((*it)[3].str());
      if (j == 0 || j >= s.step)
        throw ParseError("step " + std::to_string(s.step) + " refers to the subassembly of step " + std::to_string(j) +
                         ", which does not precede it");
      s.subassemblies.push_back(j);
    }
  }
  if (steps.empty()) throw ParseError("no \"Step k\" headings found in plan");
  for (const auto& s : steps) {
    if (!have_parts_line[s.step - 1]) throw ParseError("step " + std::to_string(s.step) + " has no parts line");
    if (s.parts.empty() && s.subassemblies.empty()) throw ParseError("step " + std::to_string(s.step) + " lists no parts");
  }
  return steps;
}

/// Inverse of parse_step_plan for plans whose parts lines are generated here.
inline std::string render_step_plan(const std::vector<StepAssignment>& steps) {
  std::string out;
  for (const auto& s : steps) {
    out += "### Step " + std::to_string(s.step) + ":\n- **Parts Needed:** ";
    bool first = true;
    auto sep = [&] {
      if (!first) out += ", ";
      first = false;
    };
    for (std::size_t j : s.subassemblies) {
      sep();
      out += "Subassembly from Step " + std::to_string(j);
    }
    for (PartId p : s.parts) {
      sep();
      out += "Part (" + std::to_string(p.value) + ")";
    }
    out += "\n- **Instructions:**\n  - Join the listed components.\n\n";
  }
  return out;
}

/// One step per non-leaf node in post-order; leaf children become parts and
/// non-leaf children subassembly references.
inline std::vector<StepAssignment> plan_from_graph(const HierarchicalAssemblyGraph& g) {
  std::vector<StepAssignment> steps;
  std::map<NodeId, std::size_t> step_of;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    const auto& n = g.node(id);
    for (NodeId c : n.children)
      if (!g.node(c).is_leaf()) walk(c);
    StepAssignment s;
    for (NodeId c : n.children) {
      if (g.node(c).is_leaf()) s.parts.push_back(g.node(c).part_set.front());
      else s.subassemblies.push_back(step_of.at(c));
    }
    s.step = steps.size() + 1;
    step_of[id] = s.step;
    steps.push_back(std::move(s));
  };
  walk(g.root);
  return steps;
}

/// Nested list built from a step plan: each step is a list of its referenced
/// subassemblies followed by its parts; the last step is the root. Every
/// earlier step must be referenced exactly once.
inline std::string steps_to_nested_list(const std::vector<StepAssignment>& steps) {
  if (steps.empty()) throw ParseError("empty step plan");
  std::vector<int> uses(steps.size() + 1, 0);
  for (const auto& s : steps)
    for (std::size_t j : s.subassemblies) {
      if (j == 0 || j >= s.step) throw ParseError("dangling subassembly reference to step " + std::to_string(j));
      if (++uses[j] > 1) throw ParseError("subassembly of step " + std::to_string(j) + " is used twice");
    }
  for (std::size_t k = 1; k < steps.size(); ++k)
    if (uses[k] == 0) throw ParseError("subassembly of step " + std::to_string(k) + " is never used");
  std::function<std::string(std::size_t)> emit = [&](std::size_t k) {
    const auto& s = steps.at(k - 1);
    std::string out = "[";
    for (std::size_t j : s.subassemblies) out += (out.size() > 1 ? "," : "") + emit(j);
    for (PartId p : s.parts) out += (out.size() > 1 ? "," : "") + std::to_string(p.value);
    return out + "]";
  };
  return emit(steps.size());
}

/// Serializes keeping the stored child order (to_nested_list sorts).
inline std::string serialize_in_order(const HierarchicalAssemblyGraph& g, NodeId id) {
  const auto& n = g.node(id);
  if (n.is_leaf()) return std::to_string(n.part_set.front().value);
  std::string out = "[";
  for (std::size_t i = 0; i < n.children.size(); ++i) out += (i ? "," : "") + serialize_in_order(g, n.children[i]);
  return out + "]";
}

namespace detail {

// Maximal bracket spans made only of digits, commas, whitespace and brackets
// that parse as a nested list; returned in compact form.
inline std::vector<std::string> tree_candidates(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while ((i = text.find('[', i)) != std::string_view::npos) {
    int depth = 0;
    std::size_t j = i;
    bool ok = true;
    for (; j < text.size(); ++j) {
      const char c = text[j];
      if (c == '[') ++depth;
      else if (c == ']') {
        if (--depth == 0) break;
      } else if (!(std::isdigit(static_cast<unsigned char>(c)) || c == ',' || std::isspace(static_cast<unsigned char>(c)))) {
        ok = false;
        break;
      }
    }
    if (!ok || j >= text.size()) {
      ++i;
      continue;
    }
    try {
      const auto g = parse_nested_list(text.substr(i, j + 1 - i));
      out.push_back(serialize_in_order(g, g.root));
      i = j + 1;
    } catch (const ParseError&) {
      ++i;
    }
  }
  return out;
}

}  // namespace detail

/// Finds the nested list in a tree-conversion response. Fenced blocks are
/// searched first. Distinct candidates are an ambiguity error. The result is
/// compact ("[[1,5],2]"), keeps the response's child order and always parses.
inline std::string parse_tree_response(std::string_view text) {
  std::vector<std::string> found;
  for (const auto& f : detail::fenced_blocks(text)) {
    auto c = detail::tree_candidates(text.substr(f.begin, f.end - f.begin));
    found.insert(found.end(), c.begin(), c.end());
  }
  if (found.empty()) found = detail::tree_candidates(text);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  if (found.empty()) throw ParseError("no nested list of integers found in response");
  if (found.size() > 1) throw ParseError("ambiguous response: " + std::to_string(found.size()) + " different nested lists");
  return found.front();
}

}  // namespace asmplan::vlm
