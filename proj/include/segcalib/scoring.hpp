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

#pragma once

#include "segcalib/mask_io.hpp"
#include "segcalib/types.hpp"

#include <span>
#include <vector>

namespace segcalib
{

struct ScoreConfig
{
  double w_r{1.0 / 3.0};
  double w_n{1.0 / 3.0};
  double w_s{1.0 / 3.0};
  /// Geometric decay over sorted class counts.
  double k_class{0.4};
  /// Point-count adjustment f(n) = max(0, 1 - k1 * n^k2).
  double k1{1.5};
  double k2{-0.4};
  std::size_t n_min{5};
  /// Cap on normals entering the O(m^2) Gram sum.
  std::size_t n_cap{512};
  double min_depth{0.1};

  void validate() const;
  bool operator==(const ScoreConfig &) const = default;
};

struct ProjectedPoint
{
  std::size_t index;
  PixelCoord coord;
};

struct MaskPointSet
{
  int mask_id{0};
  std::vector<std::size_t> members;

  std::size_t size() const { return members.size(); }
};

struct MaskScore
{
  int mask_id{0};
  double score{0.0};
  std::size_t n{0};
  double f_reflectivity{0.0};
  double f_normal{0.0};
  double f_class{0.0};
  double f_adjust{0.0};

  bool operator==(const MaskScore &) const = default;
};

struct ScoreReport
{
  double total{0.0};
  /// Surviving masks ordered by ascending mask id.
  std::vector<MaskScore> per_mask;
  std::size_t points_projected{0};
  /// True when no mask collected n_min points (total is then 0).
  bool no_overlap{false};
  double elapsed_ms{0.0};
};

/// Camera-frame projection through K [R | t]. Points closer than min_depth or
/// falling outside [0, W) x [0, H) are omitted. Output follows cloud order.
std::vector<ProjectedPoint> project(
  const PointCloud & cloud, const Extrinsic & extrinsic, const Intrinsics & intrinsics,
  double min_depth = 0.1);

/// Groups projected points by every mask containing their pixel; sets smaller than n_min dropped.
std::vector<MaskPointSet> gather(
  std::span<const ProjectedPoint> projected, const MaskSet & masks, std::size_t n_min = 5);

/// 1 minus the population variance of member reflectivities.
double f_reflectivity(std::span<const std::size_t> members, const PointCloud & cloud);

/// Mean absolute entry of the Gram matrix of valid member normals, stride-subsampled to n_cap
/// in the given member order. Returns 1 when fewer than two valid normals remain.
double f_normal(
  std::span<const std::size_t> members, const PointCloud & cloud, const ScoreConfig & cfg);

/// Class counts sorted descending (ties by ascending label), weighted by k_class^i, over n.
double f_class(
  std::span<const std::size_t> members, const PointCloud & cloud, const ScoreConfig & cfg);

double f_adjust(std::size_t n, const ScoreConfig & cfg);

/// Reusable scorer for one cloud / mask-set / camera triple. Caches a canonical point order
/// (lexicographic by attributes) so results do not depend on the input point order.
class Scorer
{
public:
  Scorer(
    const PointCloud & cloud, const MaskSet & masks, const Intrinsics & intrinsics,
    ScoreConfig cfg = {});

  ScoreReport evaluate(const Extrinsic & extrinsic) const;

  const ScoreConfig & config() const { return cfg_; }
  const MaskSet & masks() const { return *masks_; }
  const Intrinsics & intrinsics() const { return intrinsics_; }

private:
  const MaskSet * masks_;
  Intrinsics intrinsics_;
  ScoreConfig cfg_;
  // point data laid out in canonical order
  std::vector<Eigen::Vector3d> positions_;
  std::vector<Eigen::Vector3d> normals_;
  std::vector<char> normal_valid_;
  std::vector<double> reflectivity_;
  std::vector<int> labels_;
  int min_label_{-1};
  int max_label_{-1};
};

/// One-shot convenience wrapper around Scorer.
ScoreReport score(
  const PointCloud & cloud, const MaskSet & masks, const Extrinsic & extrinsic,
  const Intrinsics & intrinsics, const ScoreConfig & cfg = {});

}  // namespace segcalib
