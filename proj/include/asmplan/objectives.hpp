#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "asmplan/error.hpp"
#include "asmplan/geometry/metrics.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/graph.hpp"

namespace asmplan {

/// Weights of the rotation, translation, Chamfer, point-cloud and
/// equivalence-repulsion terms.
struct LossWeights {
  double rotation = 1.0;
  double translation = 1.0;
  double chamfer = 1.0;
  double point_cloud = 20.0;
  double equivalence = 0.1;

  bool valid() const {
    for (double w : {rotation, translation, chamfer, point_cloud, equivalence})
      if (!std::isfinite(w) || w < 0.0) return false;
    return true;
  }
};

struct LossOptions {
  /// Use ||t - t_hat||^2 instead of ||t - t_hat|| for the translation term.
  bool squared_translation = false;
};

/// Predicted and ground-truth poses with the local-frame cloud of every
/// component of one assembly step.
struct StepPrediction {
  std::map<PartId, Pose> predicted;
  std::map<PartId, Pose> ground_truth;
  std::map<PartId, PointCloud> clouds;
  /// Groups of interchangeable components; singletons may be omitted.
  std::vector<PartSet> equivalence_classes;

  void check() const {
    if (predicted.size() != ground_truth.size() || predicted.size() != clouds.size())
      throw InvalidArgument("step prediction maps have different key sets");
    for (const auto& [id, _] : predicted)
      if (!ground_truth.count(id) || !clouds.count(id))
        throw InvalidArgument("component " + std::to_string(id.value) + " missing a pose or cloud");
    for (const auto& cls : equivalence_classes)
      for (PartId p : cls)
        if (!predicted.count(p)) throw InvalidArgument("equivalence class names unknown component " + std::to_string(p.value));
  }
};

/// Per-term values. `*_mean` terms average over components; `*_sum` expose the
/// unaveraged totals. `equivalence` is the (non-positive) repulsion total.
struct LossBreakdown {
  double rotation_mean = 0.0, translation_mean = 0.0, chamfer_mean = 0.0, point_cloud_mean = 0.0;
  double rotation_sum = 0.0, translation_sum = 0.0, chamfer_sum = 0.0, point_cloud_sum = 0.0;
  double equivalence = 0.0;
  double total = 0.0;
};

inline double rot_geodesic_loss(const Quat& r, const Quat& r_hat) { return geodesic_distance(r, r_hat); }

/// Mean over points of ||R p - R_hat p||.
inline double pointcloud_mse_loss(const Quat& r, const Quat& r_hat, const std::vector<Vec3>& cloud) {
  if (cloud.empty()) throw InvalidArgument("point-cloud loss on an empty cloud");
  const Eigen::Matrix3d a = r.toRotationMatrix(), b = r_hat.toRotationMatrix();
  double sum = 0.0;
  for (const auto& p : cloud) sum += (a * p - b * p).norm();
  return sum / static_cast<double>(cloud.size());
}

/// -sum over classes, sum over unordered member pairs, of the Chamfer
/// distance between the two members' clouds under their predicted poses.
inline double equiv_repulsion_loss(const StepPrediction& prediction) {
  double total = 0.0;
  for (const auto& cls : prediction.equivalence_classes) {
    std::vector<std::vector<Vec3>> placed;
    for (PartId id : cls) placed.push_back(transform_points(prediction.predicted.at(id), prediction.clouds.at(id).points));
    for (std::size_t i = 0; i < placed.size(); ++i)
      for (std::size_t j = i + 1; j < placed.size(); ++j) total += chamfer_distance(placed[i], placed[j]);
  }
  return -total;
}

namespace detail {

// Loss with ground-truth poses taken from `gt_source[component]`.
inline LossBreakdown total_loss_assigned(const StepPrediction& p, const LossWeights& w, const LossOptions& options,
                                         const std::map<PartId, PartId>& gt_source, double equivalence) {
  LossBreakdown out;
  for (const auto& [id, pred] : p.predicted) {
    const Pose& gt = p.ground_truth.at(gt_source.at(id));
    const auto& cloud = p.clouds.at(id).points;
    out.rotation_sum += rot_geodesic_loss(gt.rotation, pred.rotation);
    const double dt = rmse_translation(gt.translation, pred.translation);
    out.translation_sum += options.squared_translation ? dt * dt : dt;
    out.chamfer_sum += chamfer_distance(transform_points(gt, cloud), transform_points(pred, cloud));
    out.point_cloud_sum += pointcloud_mse_loss(gt.rotation, pred.rotation, cloud);
  }
  const double n = p.predicted.empty() ? 1.0 : static_cast<double>(p.predicted.size());
  out.rotation_mean = out.rotation_sum / n;
  out.translation_mean = out.translation_sum / n;
  out.chamfer_mean = out.chamfer_sum / n;
  out.point_cloud_mean = out.point_cloud_sum / n;
  out.equivalence = equivalence;
  out.total = w.rotation * out.rotation_mean + w.translation * out.translation_mean + w.chamfer * out.chamfer_mean +
              w.point_cloud * out.point_cloud_mean + w.equivalence * out.equivalence;
  return out;
}

}  // namespace detail

/// Weighted sum of the five terms, with per-component terms averaged.
inline LossBreakdown total_loss(const StepPrediction& prediction, const LossWeights& weights = {},
                                const LossOptions& options = {}) {
  prediction.check();
  if (!weights.valid()) throw InvalidArgument("loss weights must be finite and non-negative");
  std::map<PartId, PartId> identity;
  for (const auto& [id, _] : prediction.predicted) identity.emplace(id, id);
  return detail::total_loss_assigned(prediction, weights, options, identity, equiv_repulsion_loss(prediction));
}

struct PermutationMinResult {
  LossBreakdown loss;
  /// component -> component whose ground-truth pose it was scored against.
  std::map<PartId, PartId> assignment;
  std::size_t permutations_tried = 0;
};

inline constexpr std::size_t kDefaultLossPermutationCap = 10'080;

/// Minimum of total_loss over reassignments of ground-truth poses within each
/// equivalence class. Permutations are visited in lexicographic order and only
/// a strictly smaller loss replaces the incumbent, so ties resolve to the
/// lexicographically smallest assignment.
inline PermutationMinResult permutation_min_loss(const StepPrediction& prediction, const LossWeights& weights = {},
                                                 const LossOptions& options = {},
                                                 std::size_t cap = kDefaultLossPermutationCap) {
  prediction.check();
  if (!weights.valid()) throw InvalidArgument("loss weights must be finite and non-negative");
  std::vector<PartSet> classes;
  for (const auto& c : prediction.equivalence_classes) {
    PartSet s = make_part_set(c);
    if (s.size() > 1) classes.push_back(s);
  }
  std::size_t required = 1;
  for (const auto& c : classes)
    for (std::size_t k = 2; k <= c.size(); ++k)
      required = required > static_cast<std::size_t>(-1) / k ? static_cast<std::size_t>(-1) : required * k;
  if (required > cap) throw PermutationCapExceeded(required, cap);

  const double equivalence = equiv_repulsion_loss(prediction);
  std::vector<PartSet> images = classes;
  PermutationMinResult best;
  bool have = false;
  while (true) {
    std::map<PartId, PartId> assignment;
    for (const auto& [id, _] : prediction.predicted) assignment.emplace(id, id);
    for (std::size_t k = 0; k < classes.size(); ++k)
      for (std::size_t i = 0; i < classes[k].size(); ++i) assignment[classes[k][i]] = images[k][i];
    LossBreakdown loss = detail::total_loss_assigned(prediction, weights, options, assignment, equivalence);
    ++best.permutations_tried;
    if (!have || loss.total < best.loss.total) {
      best.loss = loss;
      best.assignment = assignment;
      have = true;
    }
    std::size_t k = images.size();
    bool advanced = false;
    while (k-- > 0)
      if (std::next_permutation(images[k].begin(), images[k].end())) {
        advanced = true;
        break;
      }
    if (!advanced) break;
  }
  return best;
}

}  // namespace asmplan
