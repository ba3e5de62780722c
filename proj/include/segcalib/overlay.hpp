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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace segcalib
{

struct RgbImage
{
  int width{0};
  int height{0};
  std::vector<std::uint8_t> data;  // row-major RGB triples

  std::array<std::uint8_t, 3> at(int u, int v) const
  {
    const std::size_t i = 3 * (static_cast<std::size_t>(v) * width + u);
    return {data[i], data[i + 1], data[i + 2]};
  }
};

/// Deterministic tint for a mask id.
std::array<std::uint8_t, 3> mask_color(int id);

/// Blue-to-red colormap over reflectivity in [0, 1].
std::array<std::uint8_t, 3> intensity_color(double r);

/// Mask regions tinted by id (first covering mask wins), projected points drawn far-to-near as
/// single pixels colored by reflectivity.
RgbImage render_overlay(
  const PointCloud & cloud, const MaskSet & masks, const Intrinsics & intrinsics,
  const Extrinsic & extrinsic, double min_depth = 0.1);

/// Binary full-color portable pixmap (P6).
void write_ppm(const RgbImage & image, const std::filesystem::path & path);

}  // namespace segcalib
