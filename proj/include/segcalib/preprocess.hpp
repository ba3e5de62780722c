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

#include "segcalib/types.hpp"

#include <cstdint>
#include <optional>

namespace segcalib
{

struct PreprocessConfig
{
  std::size_t knn_k{20};
  /// Divisor for raw intensities; nullopt selects the 99th-percentile raw value.
  std::optional<double> intensity_scale{};
  double ransac_dist{0.10};
  std::size_t ransac_iters{500};
  double min_plane_inlier_frac{0.02};
  std::size_t max_planes{5};
  double cluster_tolerance{0.5};
  std::size_t min_cluster_size{20};
  std::uint64_t ransac_seed{0};

  /// Throws ConfigError on out-of-range values.
  void validate() const;
  bool operator==(const PreprocessConfig &) const = default;
};

/// PCA normals over the k nearest neighbors, oriented toward the sensor origin.
/// Degenerate neighborhoods get a zero (invalid) normal. Throws CloudTooSmall if n < knn_k.
PointCloud estimate_normals(const PointCloud & cloud, const PreprocessConfig & cfg);

/// Maps raw intensity to [0, 1] by the configured (or 99th-percentile) scale.
PointCloud normalize_intensity(const PointCloud & cloud, const PreprocessConfig & cfg);

/// RANSAC plane extraction followed by Euclidean clustering of the remainder.
/// Planes get labels 0, 1, ...; clusters continue the same label space; leftovers get -1.
PointCloud segment_cloud(const PointCloud & cloud, const PreprocessConfig & cfg);

/// normalize_intensity, estimate_normals and segment_cloud in sequence.
PointCloud preprocess(const PointCloud & cloud, const PreprocessConfig & cfg);

/// Linear-interpolated percentile (q in [0, 1]) of the values.
double percentile(std::vector<double> values, double q);

}  // namespace segcalib
