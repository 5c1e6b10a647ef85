#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/item_file.hpp"

namespace asmplan::vlm {

/// An image on disk. Transcripts store its content hash, never the bytes.
struct ImageRef {
  std::filesystem::path path;
};

struct ManualDocument {
  std::vector<ImageRef> pages;  // I_1..I_N
  ImageRef cover;
  ImageRef scene_image;         // labeled pre-assembly scene

  void check() const {
    if (pages.empty()) throw InvalidArgument("manual needs at least one page");
    auto exists = [](const ImageRef& r, const std::string& what) {
      if (!std::filesystem::is_regular_file(r.path)) throw InvalidArgument(what + " not found: " + r.path.string());
    };
    for (const auto& p : pages) exists(p, "manual page");
    exists(cover, "cover image");
    exists(scene_image, "scene image");
  }
};

/// Builds a document from an item file; the cover defaults to the first page.
inline ManualDocument manual_from_item(const FurnitureItem& item) {
  if (!item.scene_image) throw ConfigError("item '" + item.name + "' has no scene_image");
  ManualDocument doc;
  for (const auto& p : item.manual_images) doc.pages.push_back({item.resolve(p)});
  if (doc.pages.empty()) throw ConfigError("item '" + item.name + "' has no manual_images");
  doc.cover = {item.cover_image ? item.resolve(*item.cover_image) : doc.pages.front().path};
  doc.scene_image = {item.resolve(*item.scene_image)};
  return doc;
}

/// Stage I record: scene label(s) with a short name and functional role.
struct PartTriplet {
  std::string name;
  std::vector<PartId> label;
  std::string role;

  bool operator==(const PartTriplet&) const = default;
};

/// Stage II record. `subassemblies` holds the step numbers whose results are
/// reused in this step.
struct StepAssignment {
  std::size_t step = 0;
  std::vector<PartId> parts;
  std::vector<std::size_t> subassemblies;

  bool operator==(const StepAssignment&) const = default;
};

struct VlmRequest {
  int prompt_id = 0;  // 1..4
  std::vector<ImageRef> images;
  std::string text;
  double temperature = 0.0;
  std::string model;
};

struct VlmResponse {
  std::string text;
  nlohmann::json usage = nlohmann::json::object();
  double latency_ms = 0.0;
};

}  // namespace asmplan::vlm
