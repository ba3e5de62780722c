// Copyright 2026 The segcalib Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "segcalib/errors.hpp"
#include "segcalib/preprocess.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace segcalib
{
namespace
{

PointCloud from_positions(const std::vector<Eigen::Vector3d> & pts)
{
  PointCloud cloud;
  for (const auto & p : pts) {
    cloud.points.push_back(test::make_point(p, Eigen::Vector3d::Zero(), 0.0, -1));
  }
  return cloud;
}

std::vector<Eigen::Vector3d> grid_plane_z(double z, int n, double step)
{
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      pts.emplace_back(i * step - 0.5 * n * step, j * step - 0.5 * n * step, z);
    }
  }
  return pts;
}

// Points sampled uniformly on the surface of an axis-aligned cube.
std::vector<Eigen::Vector3d> cube_surface(
  const Eigen::Vector3d & lo, double side, int n, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> u(0.0, side);
  std::uniform_int_distribution<int> face(0, 5);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    Eigen::Vector3d p(u(rng), u(rng), u(rng));
    const int f = face(rng);
    p[f / 2] = (f % 2) ? side : 0.0;
    pts.push_back(lo + p);
  }
  return pts;
}

TEST(Normals, PlaneNormalsPointTowardOrigin)
{
  const PointCloud out = estimate_normals(from_positions(grid_plane_z(5.0, 10, 0.3)), {});
  ASSERT_EQ(out.size(), 100u);
  for (const auto & p : out.points) {
    EXPECT_NEAR(p.normal.x(), 0.0, 1e-6);
    EXPECT_NEAR(p.normal.y(), 0.0, 1e-6);
    EXPECT_NEAR(p.normal.z(), -1.0, 1e-6);
  }
}

TEST(Normals, PerpendicularPlanesAwayFromCrease)
{
  // floor z = 0 for x in [0, 4], wall x = 0 for z in [0, 4], both spanning y in [0, 4]
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i <= 40; ++i) {
    for (int j = 0; j <= 40; ++j) {
      pts.emplace_back(0.1 * i, 0.1 * j, 0.0);
      if (i > 0) {
        pts.emplace_back(0.0, 0.1 * j, 0.1 * i);
      }
    }
  }
  PointCloud cloud = from_positions(pts);
  for (auto & p : cloud.points) {
    p.position += Eigen::Vector3d(2.0, -2.0, -3.0);  // sensor origin outside both planes
  }
  const PointCloud out = estimate_normals(cloud, {});
  std::size_t checked = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::Vector3d local = pts[i];
    const Eigen::Vector3d & n = out.points[i].normal;
    if (local.z() == 0.0 && local.x() > 1.0) {
      EXPECT_NEAR(std::abs(n.z()), 1.0, 1e-3);
      ++checked;
    } else if (local.x() == 0.0 && local.z() > 1.0) {
      EXPECT_NEAR(std::abs(n.x()), 1.0, 1e-3);
      ++checked;
    }
    if (out.points[i].has_valid_normal()) {
      EXPECT_GE(n.dot(-out.points[i].position), 0.0);
    }
  }
  EXPECT_GT(checked, 2000u);
}

TEST(Normals, CollinearPointsAreInvalid)
{
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 5; ++i) {
    pts.emplace_back(1.0 + i, 2.0 + 2 * i, 3.0 - i);
  }
  PreprocessConfig cfg;
  cfg.knn_k = 5;
  const PointCloud out = estimate_normals(from_positions(pts), cfg);
  for (const auto & p : out.points) {
    EXPECT_FALSE(p.has_valid_normal());
    EXPECT_EQ(p.normal, Eigen::Vector3d::Zero());
  }
}

TEST(Normals, TooFewPointsThrows)
{
  EXPECT_THROW(estimate_normals(from_positions(grid_plane_z(1.0, 3, 0.1)), {}), CloudTooSmall);
}

TEST(Normals, RigidTransformInvariance)
{
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 400; ++i) {
    const double a = 0.05 * i;
    pts.emplace_back(3.0 * std::cos(a) + 0.01 * g(rng), 3.0 * std::sin(a), 0.02 * (i % 20));
  }
  const Extrinsic t(rotation_from_euler_deg(20, -35, 50), Eigen::Vector3d(4, -1, 2));
  std::vector<Eigen::Vector3d> moved;
  for (const auto & p : pts) {
    moved.push_back(t.apply(p));
  }
  const PointCloud a = estimate_normals(from_positions(pts), {});
  const PointCloud b = estimate_normals(from_positions(moved), {});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ASSERT_EQ(a.points[i].has_valid_normal(), b.points[i].has_valid_normal());
    if (a.points[i].has_valid_normal()) {
      const double c = std::abs((t.rotation() * a.points[i].normal).dot(b.points[i].normal));
      EXPECT_NEAR(c, 1.0, 1e-6);
    }
  }
}

TEST(Percentile, LinearInterpolation)
{
  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) {
    v.push_back(i);
  }
  std::shuffle(v.begin(), v.end(), std::mt19937_64(1));
  // position 0.99 * 99 = 98.01 between sorted values 99 and 100
  EXPECT_NEAR(percentile(v, 0.99), 99.01, 1e-12);
  EXPECT_EQ(percentile(v, 0.0), 1.0);
  EXPECT_EQ(percentile(v, 1.0), 100.0);
  EXPECT_EQ(percentile({7.0, 7.0, 7.0}, 0.99), 7.0);
  EXPECT_EQ(percentile({}, 0.5), 0.0);
}

PointCloud with_intensities(const std::vector<double> & raw)
{
  PointCloud cloud;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    cloud.points.push_back(
      test::make_point(Eigen::Vector3d(double(i), 0, 0), Eigen::Vector3d::Zero(), raw[i], -1));
  }
  return cloud;
}

std::vector<double> reflectivities(const PointCloud & cloud)
{
  std::vector<double> out;
  for (const auto & p : cloud.points) {
    out.push_back(p.reflectivity);
  }
  return out;
}

TEST(Intensity, FixedScale)
{
  PreprocessConfig cfg;
  cfg.intensity_scale = 255.0;
  EXPECT_EQ(
    reflectivities(normalize_intensity(with_intensities({0, 127.5, 255}), cfg)),
    (std::vector<double>{0.0, 0.5, 1.0}));
  cfg.intensity_scale = 1.0;
  EXPECT_EQ(
    reflectivities(normalize_intensity(with_intensities({1.0, 0.5, 0.0}), cfg)),
    (std::vector<double>{1.0, 0.5, 0.0}));
}

TEST(Intensity, AutoScaleUsesPercentile)
{
  const PreprocessConfig cfg;
  EXPECT_EQ(
    reflectivities(normalize_intensity(with_intensities({7, 7, 7, 7}), cfg)),
    (std::vector<double>(4, 1.0)));
  EXPECT_EQ(
    reflectivities(normalize_intensity(with_intensities({0, 0, 0}), cfg)),
    (std::vector<double>(3, 0.0)));

  std::vector<double> raw;
  for (int i = 1; i <= 100; ++i) {
    raw.push_back(i);
  }
  raw.back() = 1e6;  // hot outlier
  const double scale = percentile(raw, 0.99);
  const auto r = reflectivities(normalize_intensity(with_intensities(raw), cfg));
  EXPECT_NEAR(r[49], 50.0 / scale, 1e-12);
  EXPECT_EQ(r.back(), 1.0);
  for (const double x : r) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
  }
}

struct GroundAndBoxes
{
  PointCloud cloud;
  std::vector<int> truth;  // 0 ground, 1 and 2 boxes, -1 stragglers
};

GroundAndBoxes ground_and_boxes(std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  GroundAndBoxes s;
  auto add = [&](const Eigen::Vector3d & p, int truth) {
    s.cloud.points.push_back(test::make_point(p, Eigen::Vector3d::Zero(), 0.0, -1));
    s.truth.push_back(truth);
  };
  for (int i = 0; i < 10000; ++i) {
    add(Eigen::Vector3d(u(rng), u(rng), 0.0), 0);
  }
  for (const auto & p : cube_surface({-2.0, 0.0, 0.5}, 1.0, 500, rng)) {
    add(p, 1);
  }
  // tilted so no face is coplanar with a face of the first box
  const Eigen::Matrix3d tilt = rotation_from_axis_angle_deg(Eigen::Vector3d(1.0, 2.0, 3.0), 35.0);
  const Eigen::Vector3d center(2.5, 0.5, 1.3);
  for (const auto & p : cube_surface({-0.5, -0.5, -0.5}, 1.0, 500, rng)) {
    add(center + tilt * p, 2);
  }
  for (int i = 0; i < 10; ++i) {
    add(Eigen::Vector3d(-9.0 + 2.0 * i, 15.0, 3.0 + 0.5 * i), -1);
  }
  return s;
}

TEST(Segmentation, GroundBoxesAndStragglers)
{
  const GroundAndBoxes s = ground_and_boxes(1);
  const PointCloud out = segment_cloud(s.cloud, {});

  std::set<int> classes;
  std::map<int, std::map<int, int>> by_truth;
  for (std::size_t i = 0; i < out.size(); ++i) {
    classes.insert(out.points[i].label);
    ++by_truth[s.truth[i]][out.points[i].label];
  }
  classes.erase(-1);
  EXPECT_EQ(classes.size(), 3u);

  int ground_label = -2;
  int ground_best = 0;
  for (const auto & [label, count] : by_truth[0]) {
    if (count > ground_best) {
      ground_best = count;
      ground_label = label;
    }
  }
  EXPECT_NE(ground_label, -1);
  EXPECT_GE(ground_best, 9900);  // >= 99% purity
  for (const int box : {1, 2}) {
    int best = 0;
    int best_label = -2;
    for (const auto & [label, count] : by_truth[box]) {
      if (count > best) {
        best = count;
        best_label = label;
      }
    }
    EXPECT_NE(best_label, ground_label);
    EXPECT_NE(best_label, -1);
    EXPECT_GE(best, 450);
  }
  EXPECT_EQ(by_truth[-1][-1], 10);
}

TEST(Segmentation, SinglePlaneIsOneClass)
{
  PointCloud cloud = from_positions(grid_plane_z(2.0, 40, 0.1));
  const PointCloud out = segment_cloud(cloud, {});
  for (const auto & p : out.points) {
    EXPECT_EQ(p.label, 0);
  }
}

std::vector<Eigen::Vector3d> blob(const Eigen::Vector3d & c, int n, std::mt19937_64 & rng)
{
  std::normal_distribution<double> g(0.0, 0.3);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < n; ++i) {
    pts.push_back(c + Eigen::Vector3d(g(rng), g(rng), g(rng)));
  }
  return pts;
}

TEST(Segmentation, TwoSeparatedClustersGetTwoClasses)
{
  std::mt19937_64 rng(4);
  PreprocessConfig cfg;
  cfg.max_planes = 0;  // clustering only
  auto pts = blob({0, 0, 0}, 200, rng);
  // identical copy; the blob spans about 2.4 m, so the gap is at least 10 x tolerance
  auto second = pts;
  for (auto & p : second) {
    p.x() += 2.4 + 10.0 * cfg.cluster_tolerance;
  }
  pts.insert(pts.end(), second.begin(), second.end());
  const PointCloud out = segment_cloud(from_positions(pts), cfg);
  std::set<int> first_labels;
  std::set<int> second_labels;
  for (std::size_t i = 0; i < out.size(); ++i) {
    (i < 200 ? first_labels : second_labels).insert(out.points[i].label);
  }
  first_labels.erase(-1);
  second_labels.erase(-1);
  EXPECT_EQ(first_labels.size(), 1u);
  EXPECT_EQ(second_labels.size(), 1u);
  EXPECT_NE(*first_labels.begin(), *second_labels.begin());
}

TEST(Segmentation, SeededAndDeterministic)
{
  const GroundAndBoxes s = ground_and_boxes(5);
  const PointCloud a = segment_cloud(s.cloud, {});
  const PointCloud b = segment_cloud(s.cloud, {});
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a.points[i].label, b.points[i].label);
  }
}

// Partition of point positions into clusters, independent of label numbering.
std::set<std::set<std::tuple<double, double, double>>> partition(const PointCloud & cloud)
{
  std::map<int, std::set<std::tuple<double, double, double>>> groups;
  for (const auto & p : cloud.points) {
    groups[p.label].insert({p.position.x(), p.position.y(), p.position.z()});
  }
  std::set<std::set<std::tuple<double, double, double>>> out;
  for (auto & [label, members] : groups) {
    out.insert(members);
  }
  return out;
}

TEST(Segmentation, ClusteringIndependentOfPointOrder)
{
  std::mt19937_64 rng(8);
  PreprocessConfig cfg;
  cfg.max_planes = 0;
  std::vector<Eigen::Vector3d> pts;
  for (int c = 0; c < 5; ++c) {
    const auto b = blob(Eigen::Vector3d(6.0 * c, 0.0, 0.0), 80, rng);
    pts.insert(pts.end(), b.begin(), b.end());
  }
  const PointCloud a = segment_cloud(from_positions(pts), cfg);
  std::shuffle(pts.begin(), pts.end(), rng);
  const PointCloud b = segment_cloud(from_positions(pts), cfg);
  EXPECT_EQ(partition(a), partition(b));
}

TEST(Preprocess, PointInvariantsHold)
{
  const GroundAndBoxes s = ground_and_boxes(3);
  PointCloud raw = s.cloud;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 300.0);
  for (auto & p : raw.points) {
    p.reflectivity = u(rng);
  }
  const PointCloud out = preprocess(raw, {});
  ASSERT_EQ(out.size(), raw.size());
  for (const auto & p : out.points) {
    if (p.has_valid_normal()) {
      EXPECT_NEAR(p.normal.norm(), 1.0, 1e-6);
    }
    EXPECT_GE(p.reflectivity, 0.0);
    EXPECT_LE(p.reflectivity, 1.0);
    EXPECT_GE(p.label, -1);
  }
}

TEST(PreprocessConfig, Validation)
{
  PreprocessConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.knn_k = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.intensity_scale = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.ransac_dist = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace segcalib
