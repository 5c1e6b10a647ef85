#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asmplan/error.hpp"
#include "asmplan/item_file.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/plan_eval.hpp"

namespace asmplan {

/// Nested-list strings of a prediction file. `<key>.json` holds
/// {"tree": t} or {"runs": [t, ...]} with each t a string or JSON array;
/// `<key>.txt` holds one nested list.
inline std::vector<std::string> read_prediction_file(const std::filesystem::path& path) {
  if (path.extension() == ".txt") {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return {ss.str()};
  }
  const auto j = read_json_file(path);
  auto tree_text = [&](const nlohmann::json& t) {
    if (t.is_string()) return t.get<std::string>();
    if (t.is_array()) return t.dump();
    throw ParseError(path.string() + ": trees must be strings or arrays");
  };
  std::vector<std::string> out;
  if (j.contains("runs")) {
    for (const auto& t : j.at("runs")) out.push_back(tree_text(t));
  } else if (j.contains("tree")) {
    out.push_back(tree_text(j.at("tree")));
  } else {
    throw ParseError(path.string() + ": prediction needs \"tree\" or \"runs\"");
  }
  if (out.empty()) throw ParseError(path.string() + ": no runs");
  return out;
}

/// Pairs every ground-truth item file in `gt_dir` with the prediction of the
/// same stem in `pred_dir`. Missing or unparseable predictions become
/// item-level errors rather than exceptions.
inline std::vector<EvalItem> load_eval_corpus(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir) {
  if (!std::filesystem::is_directory(gt_dir)) throw ConfigError("not a directory: " + gt_dir.string());
  if (!std::filesystem::is_directory(pred_dir)) throw ConfigError("not a directory: " + pred_dir.string());
  std::map<std::string, std::filesystem::path> gts;
  for (const auto& e : std::filesystem::directory_iterator(gt_dir))
    if (e.is_regular_file() && e.path().extension() == ".json") gts[e.path().stem().string()] = e.path();
  std::vector<EvalItem> items;
  for (const auto& [key, path] : gts) {
    const FurnitureItem gt = load_item(path);
    EvalItem item;
    item.key = key;
    item.ground_truth = gt.ground_truth();
    item.part_count = gt.parts.size();
    std::filesystem::path pred = pred_dir / (key + ".json");
    if (!std::filesystem::exists(pred)) pred = pred_dir / (key + ".txt");
    try {
      if (!std::filesystem::exists(pred)) throw ParseError("no prediction file");
      for (const auto& t : read_prediction_file(pred)) item.predictions.push_back(parse_nested_list(t));
    } catch (const ParseError& e) {
      item.predictions.clear();
      item.error = e.what();
    }
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace asmplan
