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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace segcalib
{

struct IntensityProfile
{
  double mean{0.5};
  /// Standard deviation of the per-point reflectivity, at most 0.05.
  double spread{0.03};

  bool operator==(const IntensityProfile &) const = default;
};

/// Synthetic street-like scene: up to 4 planes (ground, back wall, right wall, left wall) and
/// up to 12 upright boards standing on the ground, all expressed in the camera frame and moved into the
/// LiDAR frame through the inverse ground-truth extrinsic.
struct SceneSpec
{
  std::size_t n_planes{3};
  std::size_t n_clusters{8};
  std::size_t points_per_element{4500};
  /// Per-element profiles; missing entries fall back to a spread-out default palette.
  std::vector<IntensityProfile> intensity;
  double noise_frac{0.01};
  std::uint64_t rng_seed{0};
  Intrinsics intrinsics{Intrinsics::from_focal(640.0, 640.0, 640.0, 360.0, 1280, 720)};
  Extrinsic ground_truth{default_ground_truth()};
  int mask_dilation_px{2};
  /// Replace ground-truth attributes by the preprocessing pipeline's estimates.
  bool derive_attributes{false};

  static Extrinsic default_ground_truth();
  std::size_t element_count() const { return n_planes + n_clusters; }
  IntensityProfile profile(std::size_t element) const;
  /// Throws InvalidSpec.
  void validate() const;
};

struct SyntheticScene
{
  PointCloud cloud;
  MaskSet masks;
  Extrinsic ground_truth;
  Intrinsics intrinsics;
  /// Per-pixel visible element (-1 = none), before dilation; row-major.
  std::vector<int> label_image;
};

/// Throws InvalidSpec when an element would project outside the image or is hidden.
SyntheticScene generate(const SceneSpec & spec);

enum class MaskFormat { kManifest, kImages };

struct SceneFiles
{
  std::filesystem::path cloud;
  std::filesystem::path masks;
  std::filesystem::path calibration;
};

/// Writes cloud.pcd, masks.json (or masks/mask_*.pgm) and calib.json into `dir`.
SceneFiles save_scene(
  const SyntheticScene & scene, const std::filesystem::path & dir,
  MaskFormat format = MaskFormat::kManifest);

}  // namespace segcalib
