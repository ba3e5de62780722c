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

#include "segcalib/overlay.hpp"

#include "segcalib/errors.hpp"
#include "segcalib/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace segcalib
{

namespace
{

std::array<std::uint8_t, 3> hsv_to_rgb(double h, double s, double v)
{
  const double c = v * s;
  const double hp = std::fmod(h, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  switch (static_cast<int>(hp)) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  const double m = v - c;
  auto to_byte = [](double f) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(f, 0.0, 1.0) * 255.0));
  };
  return {to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

}  // namespace

std::array<std::uint8_t, 3> mask_color(int id)
{
  const double hue = std::fmod(137.50776405 * static_cast<double>(id < 0 ? -id : id), 360.0);
  return hsv_to_rgb(hue, 0.55, 0.45);
}

std::array<std::uint8_t, 3> intensity_color(double r)
{
  const double t = std::clamp(r, 0.0, 1.0);
  return hsv_to_rgb(240.0 * (1.0 - t), 1.0, 1.0);
}

RgbImage render_overlay(
  const PointCloud & cloud, const MaskSet & masks, const Intrinsics & intrinsics,
  const Extrinsic & extrinsic, double min_depth)
{
  if (masks.width() != intrinsics.width() || masks.height() != intrinsics.height()) {
    throw DimensionMismatch("mask size differs from the intrinsics image size");
  }
  RgbImage img;
  img.width = intrinsics.width();
  img.height = intrinsics.height();
  img.data.assign(3 * static_cast<std::size_t>(img.width) * img.height, 0);
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      const auto covering = masks.masks_at(u, v);
      if (covering.empty()) {
        continue;
      }
      const auto c = mask_color(masks[covering.front()].id);
      std::copy(c.begin(), c.end(), img.data.begin() + 3 * (static_cast<std::size_t>(v) * img.width + u));
    }
  }

  auto projected = project(cloud, extrinsic, intrinsics, min_depth);
  std::stable_sort(projected.begin(), projected.end(), [](const auto & a, const auto & b) {
    return a.coord.depth > b.coord.depth;
  });
  for (const auto & pp : projected) {
    const int u = static_cast<int>(std::floor(pp.coord.u));
    const int v = static_cast<int>(std::floor(pp.coord.v));
    const auto c = intensity_color(cloud.points[pp.index].reflectivity);
    std::copy(c.begin(), c.end(), img.data.begin() + 3 * (static_cast<std::size_t>(v) * img.width + u));
  }
  return img;
}

void write_ppm(const RgbImage & image, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(
    reinterpret_cast<const char *>(image.data.data()),
    static_cast<std::streamsize>(image.data.size()));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace segcalib
