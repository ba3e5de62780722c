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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace segcalib
{

struct BoundingBox
{
  int u_min{0};
  int v_min{0};
  int u_max{-1};
  int v_max{-1};

  bool operator==(const BoundingBox &) const = default;
};

/// One binary segment over the image grid, stored row-major (1 = member).
struct Mask
{
  int id{0};
  int width{0};
  int height{0};
  std::vector<std::uint8_t> bitmap;
  std::size_t area{0};
  BoundingBox bbox;

  /// Builds a mask and computes its area and tight bounding box.
  static Mask from_bitmap(int id, int width, int height, std::vector<std::uint8_t> bitmap);

  bool at(int u, int v) const { return bitmap[static_cast<std::size_t>(v) * width + u] != 0; }
};

/// floor() rasterization of a continuous pixel coordinate; false outside the image.
bool rasterize_membership(const Mask & mask, const PixelCoord & coord);

/// Immutable set of same-sized masks with a per-pixel reverse index.
class MaskSet
{
public:
  /// Throws DimensionMismatch on size disagreement, IoError on duplicate ids,
  /// EmptyMaskSet when `masks` is empty.
  MaskSet(int width, int height, std::vector<Mask> masks);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return masks_.size(); }
  const std::vector<Mask> & masks() const { return masks_; }
  const Mask & operator[](std::size_t i) const { return masks_[i]; }

  /// Fraction of image pixels covered by two or more masks.
  double overlap_ratio() const { return overlap_ratio_; }

  /// Positions (into masks()) of every mask containing pixel (u, v); (u, v) must be in-image.
  std::span<const std::uint32_t> masks_at(int u, int v) const
  {
    const std::size_t pix = static_cast<std::size_t>(v) * width_ + u;
    return {pixel_entries_.data() + pixel_offsets_[pix], pixel_offsets_[pix + 1] - pixel_offsets_[pix]};
  }

  /// Masks dropped at load time for falling below the minimum area.
  std::size_t dropped_count() const { return dropped_; }
  void set_dropped_count(std::size_t n) { dropped_ = n; }

private:
  int width_;
  int height_;
  std::vector<Mask> masks_;
  double overlap_ratio_{0.0};
  std::vector<std::uint32_t> pixel_offsets_;
  std::vector<std::uint32_t> pixel_entries_;
  std::size_t dropped_{0};
};

struct MaskLoadOptions
{
  std::size_t min_mask_area{100};
};

/// Run-length decode: row-major, counts alternate zeros then ones starting with zeros.
/// Throws IoError unless the counts sum to width * height.
std::vector<std::uint8_t> decode_rle(std::span<const std::int64_t> counts, int width, int height);
std::vector<std::int64_t> encode_rle(std::span<const std::uint8_t> bitmap);

/// Loads a manifest document (when `path` is a file) or a directory of mask_* grayscale images.
/// A directory holding no mask images but a masks.json manifest loads the manifest.
MaskSet load_masks(const std::filesystem::path & path, const MaskLoadOptions & opts = {});

MaskSet parse_manifest(const std::string & text, const MaskLoadOptions & opts = {});
std::string encode_manifest(const MaskSet & masks);
void save_manifest(const MaskSet & masks, const std::filesystem::path & path);

/// One binary PGM (0 / 255) per mask, named mask_<id zero-padded>.pgm.
void save_mask_images(const MaskSet & masks, const std::filesystem::path & dir);

/// Grayscale image reader for P2 / P5 portable graymaps; returns values > 0 as 1.
std::vector<std::uint8_t> read_pgm_binary(
  const std::filesystem::path & path, int & width, int & height);

}  // namespace segcalib
