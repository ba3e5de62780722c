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

#include "segcalib/scoring.hpp"

#include "segcalib/errors.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <utility>

namespace segcalib
{

namespace
{

template <typename ReflectivityAt>
double reflectivity_kernel(std::size_t n, ReflectivityAt r)
{
  if (n == 0) {
    return 1.0;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean += r(i);
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = r(i) - mean;
    var += d * d;
  }
  return 1.0 - var / static_cast<double>(n);
}

// `valid` holds the valid normals in member order.
double normal_kernel(const std::vector<Eigen::Vector3d> & valid, std::size_t n_cap)
{
  const std::size_t n_valid = valid.size();
  if (n_valid < 2) {
    return 1.0;
  }
  const std::size_t m = std::min(n_valid, n_cap);
  std::vector<double> xs(m);
  std::vector<double> ys(m);
  std::vector<double> zs(m);
  for (std::size_t j = 0; j < m; ++j) {
    const Eigen::Vector3d & a = valid[j * n_valid / m];
    xs[j] = a.x();
    ys[j] = a.y();
    zs[j] = a.z();
  }
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double ax = xs[i];
    const double ay = ys[i];
    const double az = zs[i];
    diag += std::abs(ax * ax + ay * ay + az * az);
    std::array<double, 4> part{};
    std::size_t j = i + 1;
    for (; j + 4 <= m; j += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        part[l] += std::abs(ax * xs[j + l] + ay * ys[j + l] + az * zs[j + l]);
      }
    }
    for (; j < m; ++j) {
      part[0] += std::abs(ax * xs[j] + ay * ys[j] + az * zs[j]);
    }
    off += (part[0] + part[1]) + (part[2] + part[3]);
  }
  return (diag + 2.0 * off) / static_cast<double>(m * m);
}

// Counts per label, returned as (count, label) sorted by count desc then label asc.
double class_kernel(std::vector<std::pair<std::size_t, int>> counts, std::size_t n, double k)
{
  if (n == 0) {
    return 1.0;
  }
  std::sort(counts.begin(), counts.end(), [](const auto & a, const auto & b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  });
  double sum = 0.0;
  double weight = 1.0;
  for (const auto & [count, label] : counts) {
    sum += weight * static_cast<double>(count);
    weight *= k;
  }
  return sum / static_cast<double>(n);
}

bool canonical_less(const Point & a, const Point & b)
{
  for (int d = 0; d < 3; ++d) {
    if (a.position[d] != b.position[d]) {
      return a.position[d] < b.position[d];
    }
  }
  for (int d = 0; d < 3; ++d) {
    if (a.normal[d] != b.normal[d]) {
      return a.normal[d] < b.normal[d];
    }
  }
  if (a.reflectivity != b.reflectivity) {
    return a.reflectivity < b.reflectivity;
  }
  return a.label < b.label;
}

}  // namespace

void ScoreConfig::validate() const
{
  if (!(w_r >= 0.0 && w_n >= 0.0 && w_s >= 0.0) || std::abs(w_r + w_n + w_s - 1.0) > 1e-9) {
    throw ConfigError("score weights must be non-negative and sum to 1");
  }
  if (!(k_class > 0.0 && k_class < 1.0)) {
    throw ConfigError("k_class must lie in (0, 1)");
  }
  if (!(k1 > 0.0) || !(k2 < 0.0)) {
    throw ConfigError("adjusting function needs k1 > 0 and k2 < 0");
  }
  if (n_min == 0 || n_cap < 2 || !(min_depth > 0.0)) {
    throw ConfigError("n_min >= 1, n_cap >= 2 and min_depth > 0 required");
  }
}

std::vector<ProjectedPoint> project(
  const PointCloud & cloud, const Extrinsic & extrinsic, const Intrinsics & intrinsics,
  double min_depth)
{
  std::vector<ProjectedPoint> out;
  const Eigen::Matrix3d & k = intrinsics.k();
  const double w = intrinsics.width();
  const double h = intrinsics.height();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d q = extrinsic.apply(cloud.points[i].position);
    if (!(q.z() >= min_depth)) {
      continue;
    }
    const Eigen::Vector3d uvw = k * q;
    const double u = uvw.x() / uvw.z();
    const double v = uvw.y() / uvw.z();
    if (u >= 0.0 && u < w && v >= 0.0 && v < h) {
      out.push_back({i, PixelCoord{u, v, q.z()}});
    }
  }
  return out;
}

std::vector<MaskPointSet> gather(
  std::span<const ProjectedPoint> projected, const MaskSet & masks, std::size_t n_min)
{
  std::vector<MaskPointSet> sets(masks.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    sets[i].mask_id = masks[i].id;
  }
  for (const auto & pp : projected) {
    const double fu = std::floor(pp.coord.u);
    const double fv = std::floor(pp.coord.v);
    if (!(fu >= 0.0 && fv >= 0.0 && fu < masks.width() && fv < masks.height())) {
      continue;
    }
    for (const std::uint32_t mi : masks.masks_at(static_cast<int>(fu), static_cast<int>(fv))) {
      sets[mi].members.push_back(pp.index);
    }
  }
  std::erase_if(sets, [n_min](const MaskPointSet & s) { return s.size() < n_min; });
  return sets;
}

double f_reflectivity(std::span<const std::size_t> members, const PointCloud & cloud)
{
  return reflectivity_kernel(
    members.size(), [&](std::size_t i) { return cloud.points[members[i]].reflectivity; });
}

double f_normal(
  std::span<const std::size_t> members, const PointCloud & cloud, const ScoreConfig & cfg)
{
  std::vector<Eigen::Vector3d> valid;
  valid.reserve(members.size());
  for (const std::size_t idx : members) {
    if (cloud.points[idx].has_valid_normal()) {
      valid.push_back(cloud.points[idx].normal);
    }
  }
  return normal_kernel(valid, cfg.n_cap);
}

double f_class(
  std::span<const std::size_t> members, const PointCloud & cloud, const ScoreConfig & cfg)
{
  std::vector<std::pair<std::size_t, int>> counts;
  for (const std::size_t idx : members) {
    const int label = cloud.points[idx].label;
    auto it = std::find_if(counts.begin(), counts.end(), [label](const auto & c) {
      return c.second == label;
    });
    if (it == counts.end()) {
      counts.emplace_back(1, label);
    } else {
      ++it->first;
    }
  }
  return class_kernel(std::move(counts), members.size(), cfg.k_class);
}

double f_adjust(std::size_t n, const ScoreConfig & cfg)
{
  return std::max(0.0, 1.0 - cfg.k1 * std::pow(static_cast<double>(n), cfg.k2));
}

Scorer::Scorer(
  const PointCloud & cloud, const MaskSet & masks, const Intrinsics & intrinsics, ScoreConfig cfg)
: masks_(&masks), intrinsics_(intrinsics), cfg_(cfg)
{
  cfg_.validate();
  if (masks.width() != intrinsics.width() || masks.height() != intrinsics.height()) {
    throw DimensionMismatch("mask size differs from the intrinsics image size");
  }
  std::vector<std::size_t> order(cloud.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(cloud.points[a], cloud.points[b]);
  });
  positions_.reserve(order.size());
  normals_.reserve(order.size());
  normal_valid_.reserve(order.size());
  reflectivity_.reserve(order.size());
  labels_.reserve(order.size());
  for (const std::size_t idx : order) {
    const Point & p = cloud.points[idx];
    positions_.push_back(p.position);
    normals_.push_back(p.normal);
    normal_valid_.push_back(p.has_valid_normal() ? 1 : 0);
    reflectivity_.push_back(p.reflectivity);
    labels_.push_back(p.label);
  }
  if (!labels_.empty()) {
    const auto [lo, hi] = std::minmax_element(labels_.begin(), labels_.end());
    min_label_ = std::min(*lo, -1);
    max_label_ = *hi;
  }
}

ScoreReport Scorer::evaluate(const Extrinsic & extrinsic) const
{
  const auto t0 = std::chrono::steady_clock::now();
  const MaskSet & masks = *masks_;
  const Eigen::Matrix3d & rot = extrinsic.rotation();
  const Eigen::Vector3d & trans = extrinsic.translation();
  const Eigen::Matrix3d & k = intrinsics_.k();
  const double w = intrinsics_.width();
  const double h = intrinsics_.height();

  ScoreReport report;
  std::vector<std::vector<std::uint32_t>> members(masks.size());
  for (std::uint32_t i = 0; i < positions_.size(); ++i) {
    const Eigen::Vector3d q = rot * positions_[i] + trans;
    if (!(q.z() >= cfg_.min_depth)) {
      continue;
    }
    const Eigen::Vector3d uvw = k * q;
    const double u = uvw.x() / uvw.z();
    const double v = uvw.y() / uvw.z();
    if (!(u >= 0.0 && u < w && v >= 0.0 && v < h)) {
      continue;
    }
    ++report.points_projected;
    for (const std::uint32_t mi : masks.masks_at(static_cast<int>(u), static_cast<int>(v))) {
      members[mi].push_back(i);
    }
  }

  const std::size_t label_span = static_cast<std::size_t>(max_label_ - min_label_ + 1);
  std::vector<std::size_t> label_counts(label_span);
  std::vector<Eigen::Vector3d> valid_normals;
  for (std::size_t mi = 0; mi < masks.size(); ++mi) {
    const auto & set = members[mi];
    const std::size_t n = set.size();
    if (n < cfg_.n_min) {
      continue;
    }
    MaskScore ms;
    ms.mask_id = masks[mi].id;
    ms.n = n;
    ms.f_reflectivity = reflectivity_kernel(n, [&](std::size_t j) { return reflectivity_[set[j]]; });

    valid_normals.clear();
    for (const std::uint32_t r : set) {
      if (normal_valid_[r]) {
        valid_normals.push_back(normals_[r]);
      }
    }
    ms.f_normal = normal_kernel(valid_normals, cfg_.n_cap);

    std::fill(label_counts.begin(), label_counts.end(), 0);
    for (const std::uint32_t r : set) {
      ++label_counts[static_cast<std::size_t>(labels_[r] - min_label_)];
    }
    std::vector<std::pair<std::size_t, int>> counts;
    for (std::size_t l = 0; l < label_span; ++l) {
      if (label_counts[l] > 0) {
        counts.emplace_back(label_counts[l], static_cast<int>(l) + min_label_);
      }
    }
    ms.f_class = class_kernel(std::move(counts), n, cfg_.k_class);
    ms.f_adjust = f_adjust(n, cfg_);
    ms.score =
      (cfg_.w_r * ms.f_reflectivity + cfg_.w_n * ms.f_normal + cfg_.w_s * ms.f_class) * ms.f_adjust;
    report.per_mask.push_back(ms);
  }
  std::sort(report.per_mask.begin(), report.per_mask.end(), [](const auto & a, const auto & b) {
    return a.mask_id < b.mask_id;
  });

  std::size_t total_n = 0;
  for (const auto & ms : report.per_mask) {
    total_n += ms.n;
  }
  if (total_n == 0) {
    report.no_overlap = true;
  } else {
    for (const auto & ms : report.per_mask) {
      report.total += static_cast<double>(ms.n) / static_cast<double>(total_n) * ms.score;
    }
  }
  report.elapsed_ms =
    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

ScoreReport score(
  const PointCloud & cloud, const MaskSet & masks, const Extrinsic & extrinsic,
  const Intrinsics & intrinsics, const ScoreConfig & cfg)
{
  return Scorer(cloud, masks, intrinsics, cfg).evaluate(extrinsic);
}

}  // namespace segcalib
