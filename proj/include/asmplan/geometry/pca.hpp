#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "asmplan/error.hpp"
#include "asmplan/geometry/point_cloud.hpp"
#include "asmplan/geometry/pose.hpp"

namespace asmplan {

struct CanonicalFrame {
  PointCloud canonical;    // centred, principal axes along x, y, z
  Pose canonical_pose;     // maps canonical coordinates back to the input frame
  Vec3 eigenvalues;        // covariance spectrum, non-increasing
  bool ambiguous_axes = false;  // repeated eigenvalues: axes not unique
};

struct PcaOptions {
  /// Relative eigenvalue gap below which two axes count as ambiguous.
  double ambiguity_tolerance = 1e-8;
};

namespace detail {

// Flip `axis` so that the point with the largest absolute projection has a
// positive coordinate; near-ties go to the lowest point index.
inline void orient_axis(Vec3& axis, const std::vector<Vec3>& centred) {
  double max_abs = 0.0;
  for (const auto& p : centred) max_abs = std::max(max_abs, std::abs(p.dot(axis)));
  if (max_abs == 0.0) return;
  const double tie = max_abs * 1e-12;
  for (const auto& p : centred) {
    const double proj = p.dot(axis);
    if (std::abs(proj) >= max_abs - tie) {
      if (proj < 0.0) axis = -axis;
      return;
    }
  }
}

}  // namespace detail

/// Centres the cloud and rotates it into the frame of its principal axes
/// (largest variance along x). Axis signs follow the max-|projection| rule and
/// the third axis is the cross product of the first two, so the frame is
/// right-handed. Throws InvalidArgument for fewer than 3 points, non-finite
/// coordinates or coincident points.
inline CanonicalFrame pca_canonicalize(const PointCloud& cloud, const PcaOptions& options = {}) {
  if (cloud.size() < 3) throw InvalidArgument("PCA canonicalization needs at least 3 points");
  if (!all_finite(cloud.points)) throw InvalidArgument("PCA canonicalization on non-finite coordinates");

  const Vec3 c = centroid(cloud.points);
  std::vector<Vec3> centred;
  centred.reserve(cloud.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points) {
    centred.push_back(p - c);
    cov += centred.back() * centred.back().transpose();
  }
  cov /= static_cast<double>(cloud.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) throw InvalidArgument("covariance eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Vec3 ascending = solver.eigenvalues();
  const Eigen::Matrix3d vectors = solver.eigenvectors();
  Vec3 values(ascending[2], ascending[1], ascending[0]);
  const double scale = values[0];
  if (!(scale > 0.0) || scale <= 1e-300) throw InvalidArgument("degenerate covariance: all points coincide");

  Vec3 a0 = vectors.col(2).normalized();
  Vec3 a1 = vectors.col(1).normalized();
  detail::orient_axis(a0, centred);
  detail::orient_axis(a1, centred);
  Vec3 a2 = a0.cross(a1).normalized();

  Eigen::Matrix3d rot;
  rot.col(0) = a0;
  rot.col(1) = a1;
  rot.col(2) = a2;

  CanonicalFrame out;
  out.eigenvalues = values;
  const double tol = options.ambiguity_tolerance * scale;
  out.ambiguous_axes = (values[0] - values[1] <= tol) || (values[1] - values[2] <= tol);
  out.canonical_pose.rotation = Quat(rot).normalized();
  out.canonical_pose.translation = c;
  out.canonical.part = cloud.part;
  out.canonical.points.reserve(cloud.size());
  const Eigen::Matrix3d rt = rot.transpose();
  for (const auto& p : centred) out.canonical.points.push_back(rt * p);
  return out;
}

}  // namespace asmplan
