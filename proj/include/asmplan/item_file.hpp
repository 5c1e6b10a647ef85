#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/geometry/pose_json.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/sampler.hpp"

namespace asmplan {

struct ItemPart {
  PartId id;
  std::string name;
  std::filesystem::path cloud;  // relative to the item file
};

/// Furniture item description:
/// { "parts": [{"id", "name", "cloud"}], "connectivity": [[a,b],...],
///   "equivalences": [[a,b],...], "gt_tree": nested list,
///   "manual_images": [paths], optional "cover_image", "scene_image" }
struct FurnitureItem {
  std::string name;
  std::filesystem::path base_dir;
  std::vector<ItemPart> parts;
  std::vector<std::pair<PartId, PartId>> connectivity;
  std::vector<EquivalencePair> equivalences;
  std::optional<std::string> gt_tree;
  std::vector<std::filesystem::path> manual_images;
  std::optional<std::filesystem::path> cover_image;
  std::optional<std::filesystem::path> scene_image;

  PartSet part_ids() const {
    PartSet out;
    for (const auto& p : parts) out.push_back(p.id);
    return make_part_set(std::move(out));
  }

  std::filesystem::path resolve(const std::filesystem::path& p) const { return p.is_absolute() ? p : base_dir / p; }

  Connectivity connectivity_graph() const { return Connectivity(part_ids(), connectivity); }

  /// Ground-truth graph with the item's equivalences attached.
  HierarchicalAssemblyGraph ground_truth() const {
    if (!gt_tree) throw ConfigError("item '" + name + "' has no gt_tree");
    return parse_nested_list(*gt_tree, equivalences);
  }
};

namespace detail {

inline std::vector<std::pair<PartId, PartId>> pairs_from_json(const nlohmann::json& j, const char* field) {
  std::vector<std::pair<PartId, PartId>> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw ParseError(std::string("\"") + field + "\" must be an array of pairs");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw ParseError(std::string("\"") + field + "\" entries must be [int, int]");
    out.emplace_back(PartId{e[0].get<std::int64_t>()}, PartId{e[1].get<std::int64_t>()});
  }
  return out;
}

}  // namespace detail

inline FurnitureItem item_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw ParseError("furniture item must be a JSON object");
  FurnitureItem item;
  item.base_dir = base_dir;
  item.name = j.value("name", std::string{});
  if (!j.contains("parts") || !j.at("parts").is_array()) throw ParseError("furniture item needs a \"parts\" array");
  for (const auto& p : j.at("parts")) {
    if (!p.contains("id") || !p.at("id").is_number_integer()) throw ParseError("part entry needs an integer \"id\"");
    ItemPart part;
    part.id = PartId{p.at("id").get<std::int64_t>()};
    if (part.id.value < 0) throw ParseError("part ids must be non-negative");
    part.name = p.value("name", std::string{});
    part.cloud = p.value("cloud", std::string{});
    item.parts.push_back(part);
  }
  {
    auto ids = item.part_ids();
    if (ids.size() != item.parts.size()) throw ParseError("duplicate part id in furniture item");
  }
  item.connectivity = detail::pairs_from_json(j.value("connectivity", nlohmann::json()), "connectivity");
  item.equivalences = detail::pairs_from_json(j.value("equivalences", nlohmann::json()), "equivalences");
  if (j.contains("gt_tree") && !j.at("gt_tree").is_null()) {
    const auto& t = j.at("gt_tree");
    item.gt_tree = t.is_string() ? t.get<std::string>() : t.dump();
  }
  for (const auto& m : j.value("manual_images", nlohmann::json::array())) item.manual_images.emplace_back(m.get<std::string>());
  if (j.contains("cover_image")) item.cover_image = j.at("cover_image").get<std::string>();
  if (j.contains("scene_image")) item.scene_image = j.at("scene_image").get<std::string>();
  return item;
}

inline FurnitureItem load_item(const std::filesystem::path& path) {
  auto item = item_from_json(read_json_file(path), path.parent_path());
  if (item.name.empty()) item.name = path.stem().string();
  return item;
}

/// Structural problems of an item file: graph violations of the ground truth
/// plus references to parts the item does not declare.
/// Problems that make an item unusable. Single-child nodes in gt_tree are
/// left to item_warnings().
inline std::vector<std::string> validate_item(const FurnitureItem& item) {
  std::vector<std::string> problems;
  const PartSet ids = item.part_ids();
  auto known = [&](PartId p) { return std::binary_search(ids.begin(), ids.end(), p); };
  for (const auto& [a, b] : item.connectivity)
    if (!known(a) || !known(b))
      problems.push_back("connectivity references unknown part " + std::to_string((known(a) ? b : a).value));
  for (const auto& [a, b] : item.equivalences)
    if (!known(a) || !known(b))
      problems.push_back("equivalence references unknown part " + std::to_string((known(a) ? b : a).value));
  if (item.gt_tree) {
    try {
      auto g = item.ground_truth();
      for (const auto& v : validate(g))
        if (v.kind != ViolationKind::single_child) problems.push_back(v.message);
      if (g.parts().size() < 2) problems.push_back("gt_tree has fewer than two parts");
      if (g.parts() != ids) problems.push_back("gt_tree parts " + to_string(g.parts()) + " differ from declared parts " + to_string(ids));
    } catch (const ParseError& e) {
      problems.push_back(std::string("gt_tree: ") + e.what());
    }
  }
  return problems;
}

inline std::vector<std::string> item_warnings(const FurnitureItem& item) {
  std::vector<std::string> out;
  if (!item.gt_tree) return out;
  try {
    for (const auto& v : validate(item.ground_truth()))
      if (v.kind == ViolationKind::single_child) out.push_back(v.message);
  } catch (const ParseError&) {
  }
  return out;
}

}  // namespace asmplan
