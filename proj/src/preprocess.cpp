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

#include "segcalib/preprocess.hpp"

#include "segcalib/errors.hpp"
#include "segcalib/kd_index.hpp"
#include "segcalib/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace segcalib
{

namespace
{

constexpr double kDegenerateEigenGap = 1e-12;

std::vector<Eigen::Vector3d> positions_of(const PointCloud & cloud)
{
  std::vector<Eigen::Vector3d> out;
  out.reserve(cloud.size());
  for (const auto & p : cloud.points) {
    out.push_back(p.position);
  }
  return out;
}

struct Plane
{
  Eigen::Vector3d normal;
  double offset;
};

std::optional<Plane> plane_through(
  const Eigen::Vector3d & a, const Eigen::Vector3d & b, const Eigen::Vector3d & c)
{
  Eigen::Vector3d n = (b - a).cross(c - a);
  const double len = n.norm();
  if (!(len > 1e-12)) {
    return std::nullopt;
  }
  n /= len;
  return Plane{n, -n.dot(a)};
}

}  // namespace

void PreprocessConfig::validate() const
{
  if (knn_k < 3) {
    throw ConfigError("knn_k must be >= 3");
  }
  if (intensity_scale && !(*intensity_scale > 0.0)) {
    throw ConfigError("intensity_scale must be positive");
  }
  if (!(ransac_dist > 0.0) || ransac_iters == 0 || !(min_plane_inlier_frac > 0.0) ||
      !(cluster_tolerance > 0.0) || min_cluster_size == 0) {
    throw ConfigError("preprocess thresholds must be positive");
  }
}

double percentile(std::vector<double> values, double q)
{
  if (values.empty()) {
    return 0.0;
  }
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PointCloud estimate_normals(const PointCloud & cloud, const PreprocessConfig & cfg)
{
  if (cloud.size() < cfg.knn_k) {
    throw CloudTooSmall(
      "normal estimation needs at least " + std::to_string(cfg.knn_k) + " points, got " +
      std::to_string(cloud.size()));
  }
  const KdIndex index(positions_of(cloud));
  PointCloud out = cloud;
  parallel_for(cloud.size(), [&](std::size_t i) {
    const Eigen::Vector3d & query = cloud.points[i].position;
    const auto neighbors = index.knn(query, cfg.knn_k);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto & nb : neighbors) {
      mean += index.position(nb.index);
    }
    mean /= static_cast<double>(neighbors.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto & nb : neighbors) {
      const Eigen::Vector3d d = index.position(nb.index) - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(neighbors.size());

    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    const Eigen::Vector3d & evals = solver.eigenvalues();
    if (evals(1) - evals(0) <= kDegenerateEigenGap) {
      out.points[i].normal.setZero();
      return;
    }
    Eigen::Vector3d n = solver.eigenvectors().col(0).normalized();
    if (n.dot(-query) < 0.0) {
      n = -n;
    }
    out.points[i].normal = n;
  });
  return out;
}

PointCloud normalize_intensity(const PointCloud & cloud, const PreprocessConfig & cfg)
{
  double scale = 0.0;
  if (cfg.intensity_scale) {
    scale = *cfg.intensity_scale;
  } else {
    std::vector<double> raw;
    raw.reserve(cloud.size());
    for (const auto & p : cloud.points) {
      raw.push_back(p.reflectivity);
    }
    scale = percentile(std::move(raw), 0.99);
  }
  PointCloud out = cloud;
  for (auto & p : out.points) {
    p.reflectivity = scale > 0.0 ? std::clamp(p.reflectivity / scale, 0.0, 1.0) : 0.0;
  }
  return out;
}

PointCloud segment_cloud(const PointCloud & cloud, const PreprocessConfig & cfg)
{
  const std::size_t n = cloud.size();
  if (n < 3) {
    throw CloudTooSmall("segmentation needs at least 3 points");
  }
  PointCloud out = cloud;
  for (auto & p : out.points) {
    p.label = -1;
  }

  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  const auto min_inliers = static_cast<std::size_t>(
    std::max(3.0, std::ceil(cfg.min_plane_inlier_frac * static_cast<double>(n))));

  std::mt19937_64 rng(cfg.ransac_seed);
  int next_label = 0;
  for (std::size_t plane_no = 0; plane_no < cfg.max_planes && remaining.size() >= 3; ++plane_no) {
    std::uniform_int_distribution<std::size_t> pick(0, remaining.size() - 1);
    std::size_t best_count = 0;
    Plane best{};
    for (std::size_t it = 0; it < cfg.ransac_iters; ++it) {
      const std::size_t a = pick(rng);
      const std::size_t b = pick(rng);
      const std::size_t c = pick(rng);
      if (a == b || b == c || a == c) {
        continue;
      }
      const auto plane = plane_through(
        cloud.points[remaining[a]].position, cloud.points[remaining[b]].position,
        cloud.points[remaining[c]].position);
      if (!plane) {
        continue;
      }
      std::size_t count = 0;
      for (const std::size_t idx : remaining) {
        if (std::abs(plane->normal.dot(cloud.points[idx].position) + plane->offset) <=
            cfg.ransac_dist) {
          ++count;
        }
      }
      if (count > best_count) {
        best_count = count;
        best = *plane;
      }
    }
    if (best_count < min_inliers) {
      break;
    }
    std::vector<std::size_t> rest;
    rest.reserve(remaining.size() - best_count);
    for (const std::size_t idx : remaining) {
      if (std::abs(best.normal.dot(cloud.points[idx].position) + best.offset) <= cfg.ransac_dist) {
        out.points[idx].label = next_label;
      } else {
        rest.push_back(idx);
      }
    }
    ++next_label;
    remaining = std::move(rest);
  }

  if (remaining.empty()) {
    return out;
  }
  std::vector<Eigen::Vector3d> rest_pos;
  rest_pos.reserve(remaining.size());
  for (const std::size_t idx : remaining) {
    rest_pos.push_back(cloud.points[idx].position);
  }
  const KdIndex index(std::move(rest_pos));
  std::vector<char> visited(remaining.size(), 0);
  std::vector<std::size_t> component;
  std::deque<std::size_t> frontier;
  for (std::size_t seed = 0; seed < remaining.size(); ++seed) {
    if (visited[seed]) {
      continue;
    }
    component.clear();
    visited[seed] = 1;
    frontier.push_back(seed);
    while (!frontier.empty()) {
      const std::size_t cur = frontier.front();
      frontier.pop_front();
      component.push_back(cur);
      for (const std::size_t nb : index.radius(index.position(cur), cfg.cluster_tolerance)) {
        if (!visited[nb]) {
          visited[nb] = 1;
          frontier.push_back(nb);
        }
      }
    }
    if (component.size() >= cfg.min_cluster_size) {
      for (const std::size_t local : component) {
        out.points[remaining[local]].label = next_label;
      }
      ++next_label;
    }
  }
  return out;
}

PointCloud preprocess(const PointCloud & cloud, const PreprocessConfig & cfg)
{
  cfg.validate();
  return segment_cloud(estimate_normals(normalize_intensity(cloud, cfg), cfg), cfg);
}

}  // namespace segcalib
