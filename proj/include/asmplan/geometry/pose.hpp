#pragma once

#include <cmath>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace asmplan {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform in SE(3): unit quaternion rotation followed by a
/// translation in meters.
struct Pose {
  Quat rotation = Quat::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  static Pose from_matrix(const Eigen::Matrix4d& m) {
    Pose p;
    p.rotation = Quat(Eigen::Matrix3d(m.topLeftCorner<3, 3>())).normalized();
    p.translation = m.topRightCorner<3, 1>();
    return p;
  }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation.toRotationMatrix();
    m.topRightCorner<3, 1>() = translation;
    return m;
  }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
};

inline Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = (a.rotation * b.rotation).normalized();
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

inline Pose invert(const Pose& a) {
  Pose out;
  out.rotation = a.rotation.conjugate();
  out.translation = -(out.rotation * a.translation);
  return out;
}

/// Rotation angle between two rotations, in [0, pi]. Evaluated as
/// 2*atan2(|v|, |w|) of the relative quaternion, which equals
/// arccos((tr(R1^T R2) - 1) / 2) but keeps full precision near 0 and pi.
inline double geodesic_distance(const Quat& r1, const Quat& r2) {
  Quat d = r1.normalized().conjugate() * r2.normalized();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

inline double geodesic_distance(const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2) {
  return geodesic_distance(Quat(r1), Quat(r2));
}

/// Euclidean translation error ||t - t_hat||.
inline double rmse_translation(const Vec3& t, const Vec3& t_hat) { return (t - t_hat).norm(); }

/// Interpolates translation linearly and rotation by slerp along the shorter arc.
inline Pose interpolate(const Pose& a, const Pose& b, double s) {
  Pose out;
  out.translation = (1.0 - s) * a.translation + s * b.translation;
  Quat qb = b.rotation;
  if (a.rotation.dot(qb) < 0.0) qb.coeffs() = -qb.coeffs();
  out.rotation = a.rotation.slerp(s, qb).normalized();
  return out;
}

inline bool is_valid_pose(const Pose& p, double tol = 1e-9) {
  if (!p.translation.allFinite() || !p.rotation.coeffs().allFinite()) return false;
  return std::abs(p.rotation.norm() - 1.0) <= tol;
}

inline Quat axis_angle(const Vec3& axis, double angle) { return Quat(Eigen::AngleAxisd(angle, axis.normalized())); }

}  // namespace asmplan
