#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "asmplan/geometry/cloud_io.hpp"
#include "asmplan/geometry/frame_alignment.hpp"
#include "asmplan/geometry/metrics.hpp"
#include "asmplan/geometry/pca.hpp"
#include "asmplan/geometry/pose.hpp"
#include "asmplan/geometry/pose_json.hpp"
#include "asmplan/random.hpp"

using namespace asmplan;

namespace {

constexpr double kPi = std::numbers::pi;

Pose random_pose(Rng& rng, double spread = 2.0) {
  return Pose{rng.rotation(), rng.uniform(Vec3::Constant(-spread), Vec3::Constant(spread))};
}

Eigen::Matrix4d mat(const Pose& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = p.rotation.toRotationMatrix();
  m.topRightCorner<3, 1>() = p.translation;
  return m;
}

double pose_gap(const Pose& a, const Pose& b) { return (mat(a) - mat(b)).cwiseAbs().maxCoeff(); }

std::vector<Vec3> random_cloud(Rng& rng, std::size_t n, const Vec3& scale = Vec3(1.0, 0.6, 0.3)) {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(rng.uniform(Vec3::Constant(-1), Vec3::Constant(1)).cwiseProduct(scale));
  return pts;
}

// O(N^2) reference: mean over each set of squared distance to nearest point of the other.
double chamfer_oracle(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
  auto one = [](const std::vector<Vec3>& x, const std::vector<Vec3>& y) {
    double sum = 0;
    for (const auto& p : x) {
      double best = INFINITY;
      for (const auto& q : y) {
        double dx = p.x() - q.x(), dy = p.y() - q.y(), dz = p.z() - q.z();
        best = std::min(best, dx * dx + dy * dy + dz * dz);
      }
      sum += best;
    }
    return sum / double(x.size());
  };
  return one(a, b) + one(b, a);
}

}  // namespace

TEST(Pose, GroupLaws) {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    EXPECT_LT(pose_gap(compose(a, invert(a)), Pose{}), 1e-12);
    EXPECT_LT(pose_gap(compose(Pose{}, b), b), 1e-15);
    EXPECT_LT(pose_gap(compose(compose(a, b), c), compose(a, compose(b, c))), 1e-10);
    EXPECT_LT((mat(compose(a, b)) - mat(a) * mat(b)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(is_valid_pose(compose(a, b)));
  }
}

TEST(Pose, GeodesicBasics) {
  Quat id = Quat::Identity();
  EXPECT_EQ(geodesic_distance(id, id), 0.0);
  EXPECT_NEAR(geodesic_distance(id, axis_angle(Vec3::UnitZ(), kPi)), kPi, 1e-12);
  Quat q = axis_angle(Vec3(1, 2, 3), 0.7);
  EXPECT_NEAR(geodesic_distance(q, Quat(-q.coeffs())), 0.0, 1e-12);
}

TEST(Pose, GeodesicMatchesAxisAngle) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    double theta = rng.uniform(0.0, kPi);
    Quat q = axis_angle(rng.direction(), theta);
    EXPECT_NEAR(geodesic_distance(Quat::Identity(), q), theta, 1e-9);
    // matrix form through the trace formula
    Eigen::Matrix3d r = q.toRotationMatrix();
    double tr = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    EXPECT_NEAR(geodesic_distance(Eigen::Matrix3d::Identity(), r), std::acos(tr), 1e-7);
  }
}

TEST(Pose, GeodesicSymmetricAndTriangle) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    Quat a = rng.rotation(), b = rng.rotation(), c = rng.rotation();
    EXPECT_EQ(geodesic_distance(a, b), geodesic_distance(b, a));
    EXPECT_LE(geodesic_distance(a, c), geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-8);
    double d = geodesic_distance(a, b);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, kPi);
  }
}

TEST(Pose, Rmse) {
  EXPECT_EQ(rmse_translation(Vec3(0, 0, 0), Vec3(0, 0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(rmse_translation(Vec3(0, 0, 0), Vec3(3, 4, 0)), 5.0);
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    Vec3 a = rng.uniform(Vec3::Constant(-1), Vec3::Constant(1)), b = rng.uniform(Vec3::Constant(-1), Vec3::Constant(1));
    double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
    EXPECT_NEAR(rmse_translation(a, b), std::sqrt(dx * dx + dy * dy + dz * dz), 1e-15);
  }
}

TEST(Pose, InterpolateEndpoints) {
  Rng rng(5);
  Pose a = random_pose(rng), b = random_pose(rng);
  EXPECT_LT(pose_gap(interpolate(a, b, 0.0), a), 1e-12);
  EXPECT_LT(pose_gap(interpolate(a, b, 1.0), b), 1e-12);
  Pose mid = interpolate(a, b, 0.5);
  EXPECT_NEAR(geodesic_distance(a.rotation, mid.rotation), geodesic_distance(mid.rotation, b.rotation), 1e-9);
}

TEST(Chamfer, Basics) {
  std::vector<Vec3> a{{0, 0, 0}}, b{{1, 0, 0}};
  EXPECT_DOUBLE_EQ(chamfer_distance(a, b), 2.0);
  Rng rng(6);
  auto c = random_cloud(rng, 40);
  EXPECT_EQ(chamfer_distance(c, c), 0.0);
  EXPECT_THROW(chamfer_distance(std::vector<Vec3>{}, c), InvalidArgument);
}

TEST(Chamfer, MatchesQuadraticOracle) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto a = random_cloud(rng, 50), b = random_cloud(rng, 50);
    EXPECT_NEAR(chamfer_distance(a, b), chamfer_oracle(a, b), 1e-10);
    EXPECT_EQ(chamfer_distance(a, b), chamfer_distance(b, a));
  }
}

TEST(Chamfer, KdTreePathMatchesOracle) {
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    auto a = random_cloud(rng, 300), b = random_cloud(rng, 250);
    EXPECT_NEAR(chamfer_distance(a, b), chamfer_oracle(a, b), 1e-12);
  }
}

TEST(PartAccuracy, Threshold) {
  PointCloud cloud;
  cloud.points = {Vec3(0.1, 0.2, 0.3)};
  Pose gt;
  EXPECT_TRUE(part_accuracy(gt, gt, cloud));
  // single point moved by d: CD = 2 d^2
  auto moved = [](double cd) { return Pose{Quat::Identity(), Vec3(std::sqrt(cd / 2.0), 0, 0)}; };
  EXPECT_NEAR(chamfer_distance(transform_points(gt, cloud.points), transform_points(moved(0.0099), cloud.points)), 0.0099, 1e-15);
  EXPECT_TRUE(part_accuracy(gt, moved(0.0099), cloud));
  EXPECT_FALSE(part_accuracy(gt, moved(0.0101), cloud));
  PointCloud box = make_box_surface_cloud(Vec3(0.2, 0.1, 0.05), 0.02);
  EXPECT_FALSE(part_accuracy(gt, Pose{Quat::Identity(), Vec3(1, 0, 0)}, box));
  PartAccuracyOptions root;
  root.use_root_chamfer = true;
  EXPECT_FALSE(part_accuracy(gt, moved(0.0099), cloud, root));
}

TEST(Pca, AxisAlignedBox) {
  PointCloud box = make_box_surface_cloud(Vec3(0.6, 0.3, 0.1), 0.02);
  auto f = pca_canonicalize(box);
  // symmetric box: axes are the coordinate axes, signs set by the tie rule
  Eigen::Matrix3d r = f.canonical_pose.rotation.toRotationMatrix();
  EXPECT_LT((r.cwiseAbs() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT(f.canonical_pose.translation.norm(), 1e-12);
  PointCloud shifted = box;
  for (auto& p : shifted.points) p += Vec3(1, 2, 3);
  auto g = pca_canonicalize(shifted);
  EXPECT_LT((g.canonical_pose.translation - Vec3(1, 2, 3)).norm(), 1e-12);
}

TEST(Pca, PostConditions) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    PointCloud c;
    c.points = transform_points(random_pose(rng), random_cloud(rng, 60));
    auto f = pca_canonicalize(c);
    Vec3 mean = centroid(f.canonical.points);
    EXPECT_LT(mean.norm(), 1e-9);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (auto& p : f.canonical.points) cov += p * p.transpose();
    cov /= double(c.size());
    EXPECT_LT(std::abs(cov(0, 1)) + std::abs(cov(0, 2)) + std::abs(cov(1, 2)), 1e-9);
    EXPECT_GE(cov(0, 0), cov(1, 1));
    EXPECT_GE(cov(1, 1), cov(2, 2));
    auto back = transform_points(f.canonical_pose, f.canonical.points);
    for (std::size_t k = 0; k < back.size(); ++k) EXPECT_LT((back[k] - c.points[k]).norm(), 1e-9);
    EXPECT_NEAR(f.canonical_pose.rotation.toRotationMatrix().determinant(), 1.0, 1e-12);
  }
}

TEST(Pca, TransformInvarianceAndIdempotence) {
  Rng rng(10);
  for (int i = 0; i < 200; ++i) {
    PointCloud c;
    c.points = random_cloud(rng, 80);
    PointCloud moved;
    moved.points = transform_points(random_pose(rng), c.points);
    auto a = pca_canonicalize(c), b = pca_canonicalize(moved);
    ASSERT_FALSE(a.ambiguous_axes);
    for (std::size_t k = 0; k < c.size(); ++k) ASSERT_LT((a.canonical.points[k] - b.canonical.points[k]).norm(), 1e-6);
    auto again = pca_canonicalize(a.canonical);
    ASSERT_LT(pose_gap(again.canonical_pose, Pose{}), 1e-8);
  }
}

TEST(Pca, Errors) {
  PointCloud two;
  two.points = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_THROW(pca_canonicalize(two), InvalidArgument);
  PointCloud same;
  same.points = {Vec3(1, 1, 1), Vec3(1, 1, 1), Vec3(1, 1, 1)};
  EXPECT_THROW(pca_canonicalize(same), InvalidArgument);
  PointCloud nan;
  nan.points = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(NAN, 0, 0)};
  EXPECT_THROW(pca_canonicalize(nan), InvalidArgument);
}

TEST(Pca, SymmetricShapeIsFlagged) {
  PointCloud cube = make_box_surface_cloud(Vec3(0.2, 0.2, 0.2), 0.02);
  EXPECT_TRUE(pca_canonicalize(cube).ambiguous_axes);
}

TEST(FrameAlignment, AnchorRoundTrip) {
  Rng rng(11);
  Pose a = random_pose(rng);
  EXPECT_LT(pose_gap(solve_frame_alignment(a, a), Pose{}), 1e-12);
  for (int i = 0; i < 1000; ++i) {
    Pose world = random_pose(rng), manual = random_pose(rng), target = random_pose(rng);
    Pose t = solve_frame_alignment(world, manual);
    EXPECT_LT(pose_gap(compose(t, manual), world), 1e-10);
    Eigen::Matrix4d oracle = mat(world) * mat(manual).inverse();
    EXPECT_LT((mat(t) - oracle).cwiseAbs().maxCoeff(), 1e-10);
    auto mapped = map_targets_to_world(t, {{PartId{1}, target}});
    Pose rel_manual = compose(invert(manual), target);
    Pose rel_world = compose(invert(world), mapped.at(PartId{1}));
    EXPECT_LT(pose_gap(rel_manual, rel_world), 1e-10);
  }
}

TEST(FrameAlignment, BatchMapping) {
  Rng rng(12);
  std::map<PartId, Pose> targets;
  for (int i = 0; i < 10; ++i) targets[PartId{i}] = random_pose(rng);
  auto same = map_targets_to_world(Pose{}, targets);
  for (auto& [id, p] : targets) EXPECT_LT(pose_gap(same.at(id), p), 1e-15);
  Pose t = random_pose(rng);
  auto mapped = map_targets_to_world(t, targets);
  for (auto& [id, p] : targets) EXPECT_LT((mat(mapped.at(id)) - mat(t) * mat(p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CloudIo, RoundTrips) {
  auto dir = std::filesystem::temp_directory_path() / "asmplan_cloud_io";
  std::filesystem::create_directories(dir);
  Rng rng(13);
  PointCloud c;
  c.points = random_cloud(rng, 30);
  write_ply(dir / "a.ply", c);
  write_xyz(dir / "a.xyz", c);
  auto p = read_cloud(dir / "a.ply", PartId{4});
  auto x = read_cloud(dir / "a.xyz");
  ASSERT_EQ(p.size(), 30u);
  EXPECT_EQ(p.part, PartId{4});
  for (std::size_t i = 0; i < 30; ++i) {
    EXPECT_EQ(p.points[i], c.points[i]);
    EXPECT_LT((x.points[i] - c.points[i]).norm(), 1e-12);
  }
  {
    std::ofstream f(dir / "b.ply");
    f << "ply\nformat ascii 1.0\ncomment t\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nelement face 0\nproperty list uchar int vertex_indices\nend_header\n"
         "0 0 0 255\n1 0 0 0\n0 2 0.5 9\n";
  }
  auto b = read_cloud(dir / "b.ply");
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.points[2], Vec3(0, 2, 0.5));
  {
    std::ofstream f(dir / "bad.ply");
    f << "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nend_header\n0\n";
  }
  EXPECT_THROW(read_cloud(dir / "bad.ply"), Error);
  std::filesystem::remove_all(dir);
}

TEST(PoseJson, RoundTrip) {
  Rng rng(14);
  Pose p = random_pose(rng);
  Pose q = pose_from_json(pose_to_json(p));
  EXPECT_LT(pose_gap(p, q), 1e-15);
  EXPECT_THROW(pose_from_json(nlohmann::json::parse(R"({"q":[1,0,0],"t":[0,0,0]})")), Error);
  auto m = pose_map_from_json(nlohmann::json::parse(R"({"3":{"q":[2,0,0,0],"t":[1,2,3]}})"));
  EXPECT_EQ(m.at(PartId{3}).rotation.w(), 1.0);
}
