// asmplan: command-line front end.
// Exit codes: 0 success, 1 domain failure, 2 usage or configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asmplan/baselines.hpp"
#include "asmplan/eval_corpus.hpp"
#include "asmplan/eval_report.hpp"
#include "asmplan/geometry/cloud_io.hpp"
#include "asmplan/geometry/metrics.hpp"
#include "asmplan/geometry/pca.hpp"
#include "asmplan/geometry/pose_json.hpp"
#include "asmplan/item_file.hpp"
#include "asmplan/objectives.hpp"
#include "asmplan/orders.hpp"
#include "asmplan/sampler.hpp"
#include "asmplan/sim/scenario.hpp"
#include "asmplan/vlm/crop.hpp"
#include "asmplan/vlm/pipeline.hpp"
#include "asmplan/vlm/http_client.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace asmplan;

namespace {

struct Common {
  bool json_out = false;
  std::uint64_t seed = 0;
};

void emit(const Common& c, const json& j, const std::string& text) {
  if (c.json_out) std::cout << j.dump(2) << '\n';
  else std::cout << text;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t want, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": '" + tok + "' is not a number");
    }
  }
  if (out.size() != want) throw ConfigError(std::string(what) + " needs " + std::to_string(want) + " comma-separated values");
  return out;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

json part_set_json(const PartSet& s) {
  json a = json::array();
  for (PartId p : s) a.push_back(p.value);
  return a;
}

std::vector<fs::path> json_files(const fs::path& p) {
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------------ validate

int cmd_validate(const Common& c, const std::vector<std::string>& inputs) {
  json files = json::array();
  std::string text;
  std::size_t bad = 0;
  for (const auto& in : inputs) {
    if (!fs::exists(in)) throw ConfigError("no such file or directory: " + in);
    for (const auto& path : json_files(in)) {
      std::vector<std::string> problems, warnings;
      try {
        const auto item = load_item(path);
        problems = validate_item(item);
        warnings = item_warnings(item);
      } catch (const Error& e) {
        problems = {e.what()};
      }
      bad += problems.empty() ? 0 : 1;
      files.push_back({{"path", path.string()}, {"valid", problems.empty()}, {"problems", problems}, {"warnings", warnings}});
      text += (problems.empty() ? "ok    " : "FAIL  ") + path.string() + '\n';
      for (const auto& p : problems) text += "      " + p + '\n';
      for (const auto& w : warnings) text += "      warning: " + w + '\n';
    }
  }
  text += std::to_string(files.size()) + " file(s), " + std::to_string(bad) + " invalid\n";
  emit(c, {{"files", files}, {"valid", files.size() - bad}, {"invalid", bad}}, text);
  return bad ? 1 : 0;
}

// ------------------------------------------------------------------ orders

int cmd_orders(const Common& c, const std::string& tree, const std::string& item, std::size_t limit) {
  if (tree.empty() == item.empty()) throw ConfigError("give exactly one of --tree or --item");
  const auto g = tree.empty() ? load_item(item).ground_truth() : parse_nested_list(tree);
  require_valid(g);
  const auto fo = feasible_orders(g, limit);
  json orders = json::array();
  std::string text = "tree " + to_nested_list(g) + "\n" + std::to_string(fo.total) + (fo.total_saturated ? "+" : "") +
                     " feasible order(s)\n";
  for (const auto& o : fo.orders) {
    json steps = json::array();
    for (NodeId id : o.sequence) {
      steps.push_back(part_set_json(g.node(id).part_set));
      text += (steps.size() == 1 ? "  " : " -> ") + to_string(g.node(id).part_set);
    }
    text += '\n';
    orders.push_back(steps);
  }
  emit(c, {{"tree", to_nested_list(g)}, {"total", fo.total}, {"saturated", fo.total_saturated}, {"orders", orders}}, text);
  return 0;
}

// ------------------------------------------------------------------ eval-plan

int cmd_eval_plan(const Common& c, const std::string& pred, const std::string& gt, const std::string& mode_name,
                  bool per_count, unsigned threads, std::size_t cap, const std::string& baseline) {
  const MatchMode mode = match_mode_from_string(mode_name);
  std::vector<EvalItem> items;
  if (baseline.empty()) {
    if (pred.empty()) throw ConfigError("--pred is required unless --baseline is given");
    items = load_eval_corpus(pred, gt);
  } else {
    if (baseline != "singlestep") throw ConfigError("unknown baseline '" + baseline + "'");
    items = load_eval_corpus(gt, gt);
    for (auto& it : items) {
      it.error.reset();
      it.predictions = {singlestep_baseline(it.ground_truth.parts())};
    }
  }
  BatchOptions opt;
  opt.threads = threads;
  opt.match.permutation_cap = cap;
  if (per_count) opt.buckets = per_count_buckets();
  const auto report = batch_evaluate(items, opt);
  emit(c, report_to_json(report, mode), format_report_table(report, mode));
  return 0;
}

// ------------------------------------------------------------------ metrics / loss

struct PoseInput {
  std::map<PartId, PointCloud> clouds;
  std::map<PartId, Pose> predicted, ground_truth;
  std::vector<EquivalencePair> equivalences;
};

PoseInput load_pose_input(const fs::path& path) {
  const json j = read_json_file(path);
  PoseInput in;
  for (const auto& p : j.at("parts")) {
    PartId id{p.at("id").get<std::int64_t>()};
    in.clouds[id] = sim::detail::cloud_from_json(p.at("cloud"), path.parent_path(), id);
  }
  in.predicted = pose_map_from_json(j.at("predicted"));
  in.ground_truth = pose_map_from_json(j.at("ground_truth"));
  in.equivalences = detail::pairs_from_json(j.value("equivalences", json()), "equivalences");
  for (const auto& [id, _] : in.clouds)
    if (!in.predicted.count(id) || !in.ground_truth.count(id))
      throw InvalidArgument("part " + std::to_string(id.value) + " lacks a predicted or ground-truth pose");
  return in;
}

int cmd_metrics(const Common& c, const std::string& input, double threshold) {
  const auto in = load_pose_input(input);
  json parts = json::array();
  double gd_sum = 0.0, cd_sum = 0.0;
  std::size_t correct = 0;
  std::string text = "part   GD(deg)   CD          PA\n";
  for (const auto& [id, cloud] : in.clouds) {
    const double gd = geodesic_distance(in.ground_truth.at(id).rotation, in.predicted.at(id).rotation);
    const double cd = chamfer_distance(transform_points(in.ground_truth.at(id), cloud.points),
                                       transform_points(in.predicted.at(id), cloud.points));
    const bool pa = cd < threshold;
    gd_sum += gd;
    cd_sum += cd;
    correct += pa ? 1 : 0;
    parts.push_back({{"id", id.value}, {"gd", gd}, {"gd_deg", gd * 180.0 / std::numbers::pi}, {"cd", cd}, {"correct", pa}});
    char line[128];
    std::snprintf(line, sizeof(line), "%-6lld %9.3f  %-10.4g  %s\n", static_cast<long long>(id.value), gd * 180.0 / std::numbers::pi,
                  cd, pa ? "yes" : "no");
    text += line;
  }
  const double n = static_cast<double>(in.clouds.size());
  json summary{{"gd_mean", gd_sum / n}, {"cd_mean", cd_sum / n}, {"part_accuracy", static_cast<double>(correct) / n}, {"threshold", threshold}};
  text += "mean GD " + fmt(gd_sum / n) + " rad, mean CD " + fmt(cd_sum / n) + ", PA " + format_percent(static_cast<double>(correct) / n) + "%\n";
  emit(c, {{"parts", parts}, {"summary", summary}}, text);
  return 0;
}

json breakdown_json(const LossBreakdown& b) {
  return {{"rotation", b.rotation_mean}, {"translation", b.translation_mean}, {"chamfer", b.chamfer_mean},
          {"point_cloud", b.point_cloud_mean}, {"equivalence", b.equivalence}, {"total", b.total}};
}

int cmd_loss(const Common& c, const std::string& input, const std::string& weights, bool squared, bool perm_min, std::size_t cap) {
  const auto in = load_pose_input(input);
  StepPrediction p;
  p.predicted = in.predicted;
  p.ground_truth = in.ground_truth;
  p.clouds = in.clouds;
  PartSet all;
  for (const auto& [id, _] : in.clouds) all.push_back(id);
  const EquivalenceClasses eq(all, in.equivalences);
  for (const auto& cls : eq.classes())
    if (cls.size() > 1) p.equivalence_classes.push_back(cls);
  LossWeights w;
  if (!weights.empty()) {
    const auto v = parse_numbers(weights, 5, "--weights");
    w = {v[0], v[1], v[2], v[3], v[4]};
    if (!w.valid()) throw ConfigError("--weights must be finite and non-negative");
  }
  LossOptions opt{squared};
  json j;
  LossBreakdown b;
  if (perm_min) {
    const auto r = permutation_min_loss(p, w, opt, cap);
    b = r.loss;
    json assign = json::object();
    for (const auto& [from, to] : r.assignment) assign[std::to_string(from.value)] = to.value;
    j["assignment"] = assign;
    j["permutations_tried"] = r.permutations_tried;
  } else {
    b = total_loss(p, w, opt);
  }
  j["loss"] = breakdown_json(b);
  j["weights"] = {w.rotation, w.translation, w.chamfer, w.point_cloud, w.equivalence};
  std::string text = "rotation     " + fmt(b.rotation_mean) + "\ntranslation  " + fmt(b.translation_mean) + "\nchamfer      " +
                     fmt(b.chamfer_mean) + "\npoint cloud  " + fmt(b.point_cloud_mean) + "\nequivalence  " + fmt(b.equivalence) +
                     "\ntotal        " + fmt(b.total) + "\n";
  emit(c, j, text);
  return 0;
}

// ------------------------------------------------------------------ simulate / plan

int cmd_simulate(const Common& c, bool seed_given, const std::string& scenario, std::size_t trials, const std::string& thresholds) {
  auto s = sim::load_assembly_scenario(scenario);
  if (seed_given) s.params.planner.seed = c.seed;
  if (!thresholds.empty()) {
    const auto v = parse_numbers(thresholds, 3, "--thresholds");
    s.params.max_translation_error = v[0];
    s.params.max_rotation_error = v[1] * std::numbers::pi / 180.0;
    s.params.attachment_distance = v[2];
  }
  if (trials == 0) throw ConfigError("--trials must be positive");
  const auto results = sim::run_trials(s, trials);
  json jt = json::array();
  std::string text = "trial  seed  completed  result\n";
  for (std::size_t t = 0; t < results.size(); ++t) {
    const auto& r = results[t];
    json steps = json::array();
    for (const auto& o : r.outcomes)
      steps.push_back({{"index", o.step_index}, {"parts", part_set_json(s.graph.node(o.node).part_set)}, {"status", sim::to_string(o.status)},
                       {"detail", o.detail}});
    const auto fail = r.failure();
    jt.push_back({{"seed", s.params.planner.seed + t}, {"steps_completed", r.steps_completed()}, {"total_steps", r.total_steps},
                  {"success", r.success()}, {"failure", fail ? json(sim::to_string(*fail)) : json(nullptr)}, {"steps", steps}});
    char line[160];
    std::snprintf(line, sizeof(line), "%5zu  %4llu  %4zu/%-4zu  %s\n", t, static_cast<unsigned long long>(s.params.planner.seed + t),
                  r.steps_completed(), r.total_steps, fail ? sim::to_string(*fail) : "success");
    text += line;
    if (fail) text += "       " + r.outcomes.back().detail + "\n";
  }
  const double sr = sim::success_rate(results), acr = sim::acr(results);
  text += "success rate " + format_percent(sr) + "%, ACR " + fmt(acr, 4) + "\n";
  emit(c, {{"scenario", s.name.empty() ? fs::path(scenario).stem().string() : s.name}, {"trials", jt}, {"success_rate", sr}, {"acr", acr}},
       text);
  return 0;
}

int cmd_plan(const Common& c, bool seed_given, const std::string& scenario) {
  auto s = sim::load_plan_scenario(scenario);
  if (seed_given) s.params.seed = c.seed;
  const auto r = sim::rrt_connect(s.world, s.cloud, s.start, s.goal, s.params);
  double length = 0.0;
  for (std::size_t i = 1; i < r.path.size(); ++i) length += sim::se3_distance(r.path[i - 1], r.path[i], s.params.rotation_weight);
  json path = json::array();
  for (const auto& p : r.path) path.push_back(pose_to_json(p));
  const bool as_expected = !s.expect || *s.expect == r.status;
  std::string text = std::string("status ") + sim::to_string(r.status) + ", " + std::to_string(r.path.size()) + " waypoints, length " +
                     fmt(length, 4) + ", " + std::to_string(r.iterations) + " iterations\n";
  if (!as_expected) text += std::string("expected ") + sim::to_string(*s.expect) + "\n";
  emit(c, {{"status", sim::to_string(r.status)}, {"iterations", r.iterations}, {"tree_nodes", r.tree_nodes}, {"length", length},
           {"path", path}, {"expected", s.expect ? json(sim::to_string(*s.expect)) : json(nullptr)}},
       text);
  return as_expected ? 0 : 1;
}

// ------------------------------------------------------------------ sample / canonicalize

int cmd_sample(const Common& c, const std::string& item, std::size_t m, std::size_t n) {
  const auto it = load_item(item);
  const auto spec = sample_subassembly(it.connectivity_graph(), m, n, c.seed);
  json groups = json::array();
  std::string text = "selected " + to_string(spec.selected) + "\ngroups  ";
  for (const auto& g : spec.grouping) {
    groups.push_back(part_set_json(g));
    text += " " + to_string(g);
  }
  emit(c, {{"seed", c.seed}, {"selected", part_set_json(spec.selected)}, {"grouping", groups}}, text + "\n");
  return 0;
}

int cmd_canonicalize(const Common& c, const std::string& cloud_path, const std::string& out) {
  const auto cloud = read_cloud(cloud_path);
  const auto f = pca_canonicalize(cloud);
  if (!out.empty()) {
    if (fs::path(out).extension() == ".ply") write_ply(out, f.canonical);
    else write_xyz(out, f.canonical);
  }
  json j{{"canonical_pose", pose_to_json(f.canonical_pose)},
         {"eigenvalues", {f.eigenvalues.x(), f.eigenvalues.y(), f.eigenvalues.z()}},
         {"ambiguous_axes", f.ambiguous_axes},
         {"points", f.canonical.points.size()}};
  std::string text = "canonical pose " + pose_to_json(f.canonical_pose).dump() + "\neigenvalues " + fmt(f.eigenvalues.x()) + " " +
                     fmt(f.eigenvalues.y()) + " " + fmt(f.eigenvalues.z()) + (f.ambiguous_axes ? " (ambiguous axes)" : "") + "\n";
  emit(c, j, text);
  return 0;
}

// ------------------------------------------------------------------ pipeline / crop

int cmd_pipeline(const Common& c, const std::string& item_path, const std::string& endpoint, const std::string& transcript,
                 const std::string& script, std::size_t repeats, const std::string& out, const std::string& transcript_out,
                 const std::string& blobs, const std::string& plan_pages) {
  if ((!endpoint.empty()) + (!transcript.empty()) + (!script.empty()) != 1)
    throw ConfigError("give exactly one of --endpoint-config, --transcript or --script");
  const auto item = load_item(item_path);
  const auto doc = vlm::manual_from_item(item);
  vlm::PipelineOptions opt;
  opt.repeats = repeats;
  if (!plan_pages.empty()) {
    std::vector<vlm::ImageRef> pages;
    for (const auto& e : fs::directory_iterator(plan_pages))
      if (e.is_regular_file()) pages.push_back({e.path()});
    std::sort(pages.begin(), pages.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    opt.plan_pages = pages;
  }

  std::unique_ptr<vlm::VlmClient> base;
  std::unique_ptr<vlm::VlmClient> retry;
  vlm::VlmClient* client = nullptr;
  if (!endpoint.empty()) {
    const auto cfg = vlm::load_endpoint_config(endpoint);
    opt.model = cfg.model;
    opt.temperature = cfg.temperature;
    base = std::make_unique<vlm::HttpClient>(cfg);
    retry = std::make_unique<vlm::RetryingClient>(*base);
    client = retry.get();
  } else if (!transcript.empty()) {
    base = std::make_unique<vlm::ReplayClient>(vlm::read_transcript(transcript));
    client = base.get();
  } else {
    base = std::make_unique<vlm::ScriptedClient>(read_json_file(script).get<std::vector<std::string>>());
    client = base.get();
  }

  const auto result = vlm::plan_from_manual(doc, *client, opt);
  if (!transcript_out.empty()) vlm::write_transcript(transcript_out, result.transcript);
  if (!blobs.empty()) {
    std::vector<vlm::ImageRef> images = doc.pages;
    images.push_back(doc.cover);
    images.push_back(doc.scene_image);
    if (opt.plan_pages) images.insert(images.end(), opt.plan_pages->begin(), opt.plan_pages->end());
    vlm::store_blobs(images, blobs);
  }

  const auto& g = result.graph();
  json eq = json::array();
  for (const auto& [a, b] : g.equivalences) eq.push_back({a.value, b.value});
  json runs = json::array();
  for (const auto& r : result.runs) runs.push_back(r.tree);
  std::size_t same = 0;
  for (const auto& r : result.runs) same += canonical_form(r.graph) == canonical_form(g) ? 1 : 0;
  const json j{{"item", item.name},
               {"tree", result.runs[result.selected].tree},
               {"canonical", to_nested_list(g)},
               {"equivalences", eq},
               {"runs", runs},
               {"selected", result.selected},
               {"agreeing_runs", same}};
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    f << j.dump(2) << '\n';
  }
  if (repeats > 1) std::cerr << "selected run " << result.selected << " of " << repeats << " (" << same << " with the same tree)\n";
  std::string text = "tree " + result.runs[result.selected].tree + "\nequivalences";
  for (const auto& [a, b] : g.equivalences) text += " (" + std::to_string(a.value) + "," + std::to_string(b.value) + ")";
  emit(c, j, text + "\n");
  return 0;
}

int cmd_crop(const Common& c, const std::string& item_path, const std::string& boxes_path, const std::string& out) {
  const auto doc = vlm::manual_from_item(load_item(item_path));
  const json jb = read_json_file(boxes_path);
  if (!jb.is_array()) throw ParseError("crop boxes must be a JSON array with one entry per page");
  std::vector<std::optional<vlm::CropBox>> boxes;
  for (const auto& b : jb) {
    if (b.is_null()) boxes.emplace_back();
    else boxes.push_back(vlm::CropBox{b.at("x").get<int>(), b.at("y").get<int>(), b.at("width").get<int>(), b.at("height").get<int>()});
  }
  const auto cropped = vlm::crop_manual_pages(doc, boxes, out);
  json pages = json::array();
  std::string text;
  for (const auto& p : cropped.pages) {
    pages.push_back(p.path.string());
    text += p.path.string() + "\n";
  }
  emit(c, {{"pages", pages}}, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assembly planning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("--json", common.json_out, "Print JSON instead of text");
  auto* seed_opt = app.add_option("--seed", common.seed, "Random seed");

  std::vector<std::string> validate_inputs;
  auto* validate = app.add_subcommand("validate", "Check furniture item files or directories of them");
  validate->add_option("inputs", validate_inputs)->required();

  std::string tree, item;
  std::size_t limit = 10;
  auto* orders = app.add_subcommand("orders", "Count and list feasible assembly orders");
  orders->add_option("--tree", tree, "Nested list");
  orders->add_option("--item", item, "Item file (uses gt_tree)");
  orders->add_option("--limit", limit, "Orders to list");

  std::string pred, gt, mode = "exact", baseline;
  bool per_count = false;
  unsigned threads = 1;
  std::size_t perm_cap = MatchOptions{}.permutation_cap;
  auto* eval = app.add_subcommand("eval-plan", "Score predicted trees against ground truth");
  eval->add_option("--pred", pred, "Directory of predictions");
  eval->add_option("--gt", gt, "Directory of ground-truth item files")->required();
  eval->add_option("--mode", mode, "exact, simple or hard")->check(CLI::IsMember({"exact", "simple", "hard"}));
  eval->add_flag("--per-count", per_count, "One bucket per part count (2..16+)");
  eval->add_option("--threads", threads, "Worker threads");
  eval->add_option("--permutation-cap", perm_cap, "Max within-class relabelings for node matching");
  eval->add_option("--baseline", baseline, "Score a baseline instead of --pred (singlestep)");

  std::string pose_input;
  double pa_threshold = 0.01;
  auto* metrics = app.add_subcommand("metrics", "Geodesic distance, Chamfer distance and part accuracy");
  metrics->add_option("input", pose_input)->required();
  metrics->add_option("--pa-threshold", pa_threshold, "Chamfer threshold for part accuracy");

  std::string weights;
  bool squared = false, perm_min = false;
  std::size_t loss_cap = kDefaultLossPermutationCap;
  auto* loss = app.add_subcommand("loss", "Pose loss of one assembly step");
  loss->add_option("input", pose_input)->required();
  loss->add_option("--weights", weights, "rotation,translation,chamfer,point_cloud,equivalence");
  loss->add_flag("--squared-translation", squared);
  loss->add_flag("--permutation-min", perm_min, "Minimize over equivalent-part assignments");
  loss->add_option("--permutation-cap", loss_cap);

  std::string scenario, thresholds;
  std::size_t trials = 1;
  auto* simulate = app.add_subcommand("simulate", "Execute an assembly scenario");
  simulate->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);
  simulate->add_option("--trials", trials);
  simulate->add_option("--thresholds", thresholds, "translation_m,rotation_deg,attachment_m");

  auto* plan = app.add_subcommand("plan", "Run the motion planner on a single query");
  plan->add_option("scenario", scenario)->required()->check(CLI::ExistingFile);

  std::size_t m = 0, n = 1;
  auto* sample = app.add_subcommand("sample", "Sample a connected subassembly");
  sample->add_option("--item", item)->required();
  sample->add_option("-m", m, "Parts to select")->required();
  sample->add_option("-n", n, "Groups");

  std::string cloud, out;
  auto* canon = app.add_subcommand("canonicalize", "PCA canonical frame of a point cloud");
  canon->add_option("cloud", cloud)->required()->check(CLI::ExistingFile);
  canon->add_option("--out", out, "Write the canonical cloud (.xyz or .ply)");

  std::string endpoint, transcript, script, transcript_out, blobs, plan_pages;
  std::size_t repeats = 1;
  auto* pipeline = app.add_subcommand("pipeline", "Generate an assembly tree from a manual");
  pipeline->add_option("--item", item)->required();
  pipeline->add_option("--endpoint-config", endpoint);
  pipeline->add_option("--transcript", transcript, "Replay a recorded transcript");
  pipeline->add_option("--script", script, "JSON array of canned responses");
  pipeline->add_option("--repeats", repeats);
  pipeline->add_option("--out", out, "Write the graph JSON here");
  pipeline->add_option("--transcript-out", transcript_out);
  pipeline->add_option("--blobs", blobs, "Copy input images here, named by hash");
  pipeline->add_option("--plan-pages", plan_pages, "Directory of cropped pages for the step-plan prompt");

  std::string boxes;
  auto* crop = app.add_subcommand("crop", "Crop manual pages");
  crop->add_option("--item", item)->required();
  crop->add_option("--boxes", boxes)->required();
  crop->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const bool seed_given = seed_opt->count() > 0;
    if (*validate) return cmd_validate(common, validate_inputs);
    if (*orders) return cmd_orders(common, tree, item, limit);
    if (*eval) return cmd_eval_plan(common, pred, gt, mode, per_count, threads, perm_cap, baseline);
    if (*metrics) return cmd_metrics(common, pose_input, pa_threshold);
    if (*loss) return cmd_loss(common, pose_input, weights, squared, perm_min, loss_cap);
    if (*simulate) return cmd_simulate(common, seed_given, scenario, trials, thresholds);
    if (*plan) return cmd_plan(common, seed_given, scenario);
    if (*sample) return cmd_sample(common, item, m, n);
    if (*canon) return cmd_canonicalize(common, cloud, out);
    if (*pipeline) return cmd_pipeline(common, item, endpoint, transcript, script, repeats, out, transcript_out, blobs, plan_pages);
    if (*crop) return cmd_crop(common, item, boxes, out);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON input: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
