#pragma once

#include <algorithm>
#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

enum class MatchMode { simple, hard, exact };

inline const char* to_string(MatchMode m) {
  switch (m) {
    case MatchMode::simple: return "simple";
    case MatchMode::hard: return "hard";
    case MatchMode::exact: return "exact";
  }
  return "?";
}

inline MatchMode match_mode_from_string(const std::string& s) {
  if (s == "simple") return MatchMode::simple;
  if (s == "hard") return MatchMode::hard;
  if (s == "exact") return MatchMode::exact;
  throw InvalidArgument("unknown match mode '" + s + "' (expected simple, hard or exact)");
}

struct MatchScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool exact = false;
};

inline double f1_score(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

struct MatchOptions {
  /// Upper bound on within-class relabelings tried by node matching.
  std::size_t permutation_cap = 40'320;
};

namespace detail {

inline void require_same_parts(const HierarchicalAssemblyGraph& pred, const HierarchicalAssemblyGraph& gt) {
  require_valid(pred);
  require_valid(gt);
  if (pred.parts() != gt.parts())
    throw InvalidArgument("part sets differ: predicted " + to_string(pred.parts()) + " vs ground truth " +
                          to_string(gt.parts()));
}

struct NodeDescriptor {
  PartSet parts;
  std::vector<PartSet> children;  // sorted
};

inline std::vector<NodeDescriptor> describe_non_leaves(const HierarchicalAssemblyGraph& g) {
  std::vector<NodeDescriptor> out;
  for (NodeId id : g.non_leaf_nodes()) {
    NodeDescriptor d;
    d.parts = g.nodes[id].part_set;
    for (NodeId c : g.nodes[id].children) d.children.push_back(g.nodes[c].part_set);
    std::sort(d.children.begin(), d.children.end());
    out.push_back(std::move(d));
  }
  return out;
}

inline std::vector<PartId> class_signature(const PartSet& parts, const EquivalenceClasses& classes) {
  std::vector<PartId> sig;
  for (PartId p : parts) sig.push_back(classes.representative(p));
  std::sort(sig.begin(), sig.end());
  return sig;
}

/// Odometer over the product of per-class permutations, lexicographic.
class ClassPermutations {
 public:
  explicit ClassPermutations(const EquivalenceClasses& classes) {
    for (const auto& c : classes.classes())
      if (c.size() > 1) {
        source_.push_back(c);
        image_.push_back(c);
      }
  }

  PartId operator()(PartId p) const {
    for (std::size_t k = 0; k < source_.size(); ++k) {
      auto it = std::lower_bound(source_[k].begin(), source_[k].end(), p);
      if (it != source_[k].end() && *it == p) return image_[k][static_cast<std::size_t>(it - source_[k].begin())];
    }
    return p;
  }

  bool advance() {
    for (std::size_t k = source_.size(); k-- > 0;)
      if (std::next_permutation(image_[k].begin(), image_[k].end())) return true;
    return false;
  }

  PartSet apply(const PartSet& parts) const {
    PartSet out;
    out.reserve(parts.size());
    for (PartId p : parts) out.push_back((*this)(p));
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<PartSet> source_;
  std::vector<PartSet> image_;
};

}  // namespace detail

/// True iff some relabeling of `pred` that permutes parts only within their
/// equivalence classes makes it isomorphic to `gt`. Decided by comparing the
/// canonical forms with every part replaced by its class representative: an
/// isomorphism of the class-labelled trees maps each leaf to a leaf of the
/// same class, which is exactly such a relabeling.
inline bool exact_match(const HierarchicalAssemblyGraph& pred, const HierarchicalAssemblyGraph& gt,
                        const EquivalenceClasses& classes) {
  detail::require_same_parts(pred, gt);
  return class_canonical_form(pred, classes) == class_canonical_form(gt, classes);
}

inline bool exact_match(const HierarchicalAssemblyGraph& pred, const HierarchicalAssemblyGraph& gt) {
  return exact_match(pred, gt, equivalence_classes(gt));
}

/// Node-level precision/recall over non-leaf nodes.
///  simple: a predicted node matches a ground-truth node with the same part set;
///  hard:   additionally the children's part sets must coincide;
///  exact:  all three scores are 1 if exact_match holds, else 0.
/// The score is maximized over within-class relabelings of the prediction.
inline MatchScores node_match_scores(const HierarchicalAssemblyGraph& pred, const HierarchicalAssemblyGraph& gt,
                                     const EquivalenceClasses& classes, MatchMode mode,
                                     const MatchOptions& options = {}) {
  MatchScores scores;
  scores.exact = exact_match(pred, gt, classes);
  if (scores.exact || mode == MatchMode::exact) {
    const double v = scores.exact ? 1.0 : 0.0;
    scores.precision = scores.recall = scores.f1 = v;
    return scores;
  }

  const auto pred_nodes = detail::describe_non_leaves(pred);
  const auto gt_nodes = detail::describe_non_leaves(gt);
  std::map<PartSet, std::vector<std::size_t>> gt_by_parts;
  std::set<std::vector<PartId>> gt_signatures;
  for (std::size_t i = 0; i < gt_nodes.size(); ++i) {
    gt_by_parts[gt_nodes[i].parts].push_back(i);
    gt_signatures.insert(detail::class_signature(gt_nodes[i].parts, classes));
  }
  // Nodes whose class multiset matches no ground-truth node can never match.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < pred_nodes.size(); ++i)
    if (gt_signatures.count(detail::class_signature(pred_nodes[i].parts, classes))) candidates.push_back(i);

  std::size_t best_pred = 0, best_gt = 0;
  if (!candidates.empty()) {
    const std::size_t required = classes.permutation_count();
    if (required > options.permutation_cap) throw PermutationCapExceeded(required, options.permutation_cap);
    detail::ClassPermutations sigma(classes);
    std::vector<char> gt_hit(gt_nodes.size());
    do {
      std::fill(gt_hit.begin(), gt_hit.end(), 0);
      std::size_t matched_pred = 0;
      for (std::size_t i : candidates) {
        const auto& node = pred_nodes[i];
        auto it = gt_by_parts.find(sigma.apply(node.parts));
        if (it == gt_by_parts.end()) continue;
        bool any = false;
        for (std::size_t j : it->second) {
          if (mode == MatchMode::hard) {
            std::vector<PartSet> mapped;
            for (const auto& c : node.children) mapped.push_back(sigma.apply(c));
            std::sort(mapped.begin(), mapped.end());
            if (mapped != gt_nodes[j].children) continue;
          }
          gt_hit[j] = 1;
          any = true;
        }
        if (any) ++matched_pred;
      }
      const std::size_t matched_gt = static_cast<std::size_t>(std::count(gt_hit.begin(), gt_hit.end(), 1));
      if (matched_pred + matched_gt > best_pred + best_gt) {
        best_pred = matched_pred;
        best_gt = matched_gt;
      }
    } while (best_pred < pred_nodes.size() && sigma.advance());
  }
  scores.precision = pred_nodes.empty() ? 0.0 : static_cast<double>(best_pred) / static_cast<double>(pred_nodes.size());
  scores.recall = gt_nodes.empty() ? 0.0 : static_cast<double>(best_gt) / static_cast<double>(gt_nodes.size());
  scores.f1 = f1_score(scores.precision, scores.recall);
  return scores;
}

// ---------------------------------------------------------------------------
// Batch evaluation

struct BucketRange {
  std::string label;
  std::size_t lo = 0;
  std::size_t hi = std::numeric_limits<std::size_t>::max();  // inclusive

  bool contains(std::size_t n) const { return n >= lo && n <= hi; }
};

/// Part-count buckets 2-4, 5-6, 7-8, 9+.
inline std::vector<BucketRange> standard_buckets() {
  return {{"2~4", 2, 4}, {"5~6", 5, 6}, {"7~8", 7, 8}, {"9+", 9, std::numeric_limits<std::size_t>::max()}};
}

/// One bucket per part count in [lo, hi]; the last one is open-ended.
inline std::vector<BucketRange> per_count_buckets(std::size_t lo = 2, std::size_t hi = 16) {
  std::vector<BucketRange> out;
  for (std::size_t n = lo; n <= hi; ++n) {
    BucketRange b{std::to_string(n), n, n};
    if (n == hi) {
      b.hi = std::numeric_limits<std::size_t>::max();
      b.label += "+";
    }
    out.push_back(b);
  }
  return out;
}

struct EvalItem {
  std::string key;
  /// One or more runs; scores are best-of-runs per metric.
  std::vector<HierarchicalAssemblyGraph> predictions;
  /// Carries the equivalence pairs used for permutation-aware scoring.
  HierarchicalAssemblyGraph ground_truth;
  /// Part count for bucketing; 0 means "count the ground-truth leaves".
  std::size_t part_count = 0;
  /// Pre-recorded problem (e.g. an unparseable prediction); the item then
  /// counts as a failure with zero scores.
  std::optional<std::string> error;
};

struct ItemEvaluation {
  std::string key;
  std::size_t part_count = 0;
  bool exact = false;
  std::optional<MatchScores> simple;  // empty when undecided by cap
  std::optional<MatchScores> hard;
  bool undecided_by_cap = false;
  std::optional<std::string> error;
};

struct BucketSummary {
  BucketRange range;
  std::size_t count = 0;
  std::size_t exact_count = 0;
  double success_rate = 0.0;  // exact_count / count, in [0, 1]
  std::size_t scored_count = 0;
  MatchScores simple_mean;
  MatchScores hard_mean;
};

struct EvaluationReport {
  std::vector<ItemEvaluation> items;  // sorted by key
  std::vector<BucketSummary> buckets;
  BucketSummary overall;
  std::vector<std::string> undecided;  // keys exceeding the permutation cap
  std::vector<std::string> errors;     // keys with item-level errors
};

struct BatchOptions {
  MatchOptions match;
  std::vector<BucketRange> buckets = standard_buckets();
  unsigned threads = 1;
};

inline ItemEvaluation evaluate_item(const EvalItem& item, const MatchOptions& options) {
  ItemEvaluation out;
  out.key = item.key;
  out.part_count = item.part_count;
  try {
    if (out.part_count == 0) out.part_count = item.ground_truth.parts().size();
  } catch (const std::exception&) {
  }
  auto fail = [&](const std::string& what) {
    out.error = what;
    out.exact = false;
    out.simple = MatchScores{};
    out.hard = MatchScores{};
    return out;
  };
  if (item.error) return fail(*item.error);
  if (item.predictions.empty()) return fail("no prediction");
  try {
    const EquivalenceClasses classes = equivalence_classes(item.ground_truth);
    for (const auto& pred : item.predictions) {
      out.exact = out.exact || exact_match(pred, item.ground_truth, classes);
      for (MatchMode mode : {MatchMode::simple, MatchMode::hard}) {
        auto& slot = mode == MatchMode::simple ? out.simple : out.hard;
        try {
          MatchScores s = node_match_scores(pred, item.ground_truth, classes, mode, options);
          if (!out.undecided_by_cap && (!slot || s.f1 > slot->f1)) slot = s;
        } catch (const PermutationCapExceeded&) {
          out.undecided_by_cap = true;
        }
      }
    }
    if (out.undecided_by_cap) {
      out.simple.reset();
      out.hard.reset();
    }
    if (out.simple) out.simple->exact = out.exact;
    if (out.hard) out.hard->exact = out.exact;
  } catch (const Error& e) {
    return fail(e.what());
  }
  return out;
}

namespace detail {

inline BucketSummary summarize(const BucketRange& range, const std::vector<const ItemEvaluation*>& items) {
  BucketSummary s;
  s.range = range;
  for (const auto* it : items) {
    ++s.count;
    if (it->exact) ++s.exact_count;
    if (it->simple && it->hard) {
      ++s.scored_count;
      s.simple_mean.precision += it->simple->precision;
      s.simple_mean.recall += it->simple->recall;
      s.simple_mean.f1 += it->simple->f1;
      s.hard_mean.precision += it->hard->precision;
      s.hard_mean.recall += it->hard->recall;
      s.hard_mean.f1 += it->hard->f1;
    }
  }
  if (s.count) s.success_rate = static_cast<double>(s.exact_count) / static_cast<double>(s.count);
  if (s.scored_count) {
    const double n = static_cast<double>(s.scored_count);
    for (auto* m : {&s.simple_mean, &s.hard_mean}) {
      m->precision /= n;
      m->recall /= n;
      m->f1 /= n;
    }
  }
  return s;
}

}  // namespace detail

/// Scores every item and aggregates success rate and mean node-matching
/// scores per part-count bucket and overall. Item order in the report is by
/// key regardless of `threads`.
inline EvaluationReport batch_evaluate(const std::vector<EvalItem>& items, const BatchOptions& options = {}) {
  EvaluationReport report;
  report.items.resize(items.size());
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(items.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < items.size(); ++i) report.items[i] = evaluate_item(items[i], options.match);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < items.size(); i = next++) report.items[i] = evaluate_item(items[i], options.match);
      });
    for (auto& th : pool) th.join();
  }
  std::sort(report.items.begin(), report.items.end(), [](const auto& a, const auto& b) { return a.key < b.key; });

  std::vector<const ItemEvaluation*> all;
  for (const auto& it : report.items) {
    all.push_back(&it);
    if (it.undecided_by_cap) report.undecided.push_back(it.key);
    if (it.error) report.errors.push_back(it.key);
  }
  for (std::size_t b = 0; b < options.buckets.size(); ++b) {
    const auto& range = options.buckets[b];
    std::vector<const ItemEvaluation*> members;
    for (const auto* it : all) {
      // Part counts below the first bucket fall into it.
      const std::size_t n = b == 0 ? std::max(it->part_count, range.lo) : it->part_count;
      if (range.contains(n)) members.push_back(it);
    }
    report.buckets.push_back(detail::summarize(range, members));
  }
  report.overall = detail::summarize({"Average", 0, std::numeric_limits<std::size_t>::max()}, all);
  return report;
}

}  // namespace asmplan
