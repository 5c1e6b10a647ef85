#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"
#include "asmplan/nested_list.hpp"
#include "asmplan/vlm/client.hpp"
#include "asmplan/vlm/parsers.hpp"
#include "asmplan/vlm/prompts.hpp"

namespace asmplan::vlm {

/// A response that could not be turned into the stage's output.
class StageError : public ParseError {
 public:
  StageError(std::string stage, const std::string& what)
      : ParseError("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct PipelineOptions {
  std::size_t repeats = 1;
  std::string model;
  double temperature = 0.0;
  /// Cropped pages for the step-plan prompt; the full pages when absent.
  std::optional<std::vector<ImageRef>> plan_pages;
  ShapeCheck shape;
};

struct PipelineRun {
  std::vector<PartTriplet> parts;      // stage 1, names and labels
  std::vector<PartTriplet> triplets;   // stage 2, with roles
  std::vector<StepAssignment> steps;
  std::string tree;                    // compact nested list from prompt 4
  HierarchicalAssemblyGraph graph;     // with equivalences attached
};

struct PipelineResult {
  std::vector<PipelineRun> runs;
  std::size_t selected = 0;
  std::vector<TranscriptRecord> transcript;

  const HierarchicalAssemblyGraph& graph() const { return runs.at(selected).graph; }
  const std::vector<EquivalencePair>& equivalences() const { return graph().equivalences; }
};

/// Index of the most frequent canonical form; ties go to the earliest run.
inline std::size_t select_modal(const std::vector<HierarchicalAssemblyGraph>& graphs) {
  if (graphs.empty()) throw InvalidArgument("no graphs to select from");
  std::map<std::string, std::size_t> count;
  for (const auto& g : graphs) ++count[canonical_form(g)];
  std::size_t best = 0;
  for (std::size_t i = 1; i < graphs.size(); ++i)
    if (count[canonical_form(graphs[i])] > count[canonical_form(graphs[best])]) best = i;
  return best;
}

namespace detail {

template <typename F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const ParseError& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace detail

/// Runs prompts 1 to 4 in order, feeding each stage the previous output:
/// the part JSON of prompt 1 is appended to prompt 2, the refined JSON of
/// prompt 2 to prompt 3, and the text plan of prompt 3 to prompt 4. With
/// repeats > 1 the whole chain runs again and the modal graph is selected.
inline PipelineResult plan_from_manual(const ManualDocument& doc, VlmClient& client, const PipelineOptions& options = {}) {
  doc.check();
  if (options.repeats == 0) throw InvalidArgument("pipeline needs at least one repeat");
  PipelineResult result;
  auto ask = [&](std::size_t run, int id, const PromptBindings& b) {
    VlmRequest req = render_prompt(id, b, options.model, options.temperature);
    VlmResponse resp = client.complete(req);
    TranscriptRecord rec = make_record(req, resp);
    rec.seq = result.transcript.size();
    rec.run = run;
    result.transcript.push_back(rec);
    return resp.text;
  };

  for (std::size_t run = 0; run < options.repeats; ++run) {
    PipelineRun out;
    PromptBindings b;
    b.scene = doc.scene_image;
    b.cover = doc.cover;
    const std::string r1 = ask(run, 1, b);
    out.parts = detail::in_stage("parts", [&] { return parse_triplets(r1); });
    if (out.parts.empty()) throw StageError("parts", "no parts listed");

    b.pages = doc.pages;
    b.text["stage1_json"] = detail::in_stage("parts", [&] { return extract_json_array(r1).dump(2); });
    const std::string r2 = ask(run, 2, b);
    out.triplets = detail::in_stage("roles", [&] { return parse_triplets(r2); });
    if (out.triplets.empty()) throw StageError("roles", "no parts listed");

    b.pages = options.plan_pages ? *options.plan_pages : doc.pages;
    b.text["stage2_json"] = extract_json_array(r2).dump(2);
    const std::string r3 = ask(run, 3, b);
    out.steps = detail::in_stage("plan", [&] { return parse_step_plan(r3); });

    PromptBindings b4;
    b4.text["plan"] = r3;
    const std::string r4 = ask(run, 4, b4);
    out.tree = detail::in_stage("tree", [&] { return parse_tree_response(r4); });

    std::vector<PartId> labelled;
    for (const auto& t : out.triplets) labelled.insert(labelled.end(), t.label.begin(), t.label.end());
    const PartSet labels = make_part_set(labelled);
    if (labels.size() != labelled.size()) throw StageError("roles", "a label is listed twice");
    out.graph = parse_nested_list(out.tree, derive_equivalences(out.triplets, options.shape));
    if (out.graph.parts() != labels)
      throw StageError("tree", "tree parts " + to_string(out.graph.parts()) + " differ from labelled parts " + to_string(labels));
    if (auto v = validate(out.graph); !v.empty()) throw StageError("tree", "invalid graph: " + v.front().message);
    result.runs.push_back(std::move(out));
  }
  std::vector<HierarchicalAssemblyGraph> graphs;
  for (const auto& r : result.runs) graphs.push_back(r.graph);
  result.selected = select_modal(graphs);
  return result;
}

}  // namespace asmplan::vlm
