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

#include "segcalib/mask_io.hpp"

#include "segcalib/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace segcalib
{

namespace
{

using ordered_json = nlohmann::ordered_json;

bool starts_with(const std::string & s, const std::string & prefix)
{
  return s.rfind(prefix, 0) == 0;
}

// Skips whitespace and '#' comments in a PNM header.
void skip_pnm_space(std::istream & in)
{
  while (true) {
    const int ch = in.peek();
    if (ch == '#') {
      std::string discard;
      std::getline(in, discard);
    } else if (std::isspace(ch)) {
      in.get();
    } else {
      return;
    }
  }
}

int read_pnm_int(std::istream & in, const std::filesystem::path & path)
{
  skip_pnm_space(in);
  int value = -1;
  if (!(in >> value) || value < 0) {
    throw IoError(path.string() + ": malformed PGM header");
  }
  return value;
}

std::vector<Mask> finalize(
  std::vector<Mask> masks, const MaskLoadOptions & opts, std::size_t & dropped)
{
  std::vector<Mask> kept;
  kept.reserve(masks.size());
  for (auto & m : masks) {
    if (m.area < opts.min_mask_area) {
      ++dropped;
    } else {
      kept.push_back(std::move(m));
    }
  }
  return kept;
}

}  // namespace

Mask Mask::from_bitmap(int id, int width, int height, std::vector<std::uint8_t> bitmap)
{
  if (width <= 0 || height <= 0 ||
      bitmap.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw DimensionMismatch("mask bitmap does not match its declared size");
  }
  Mask m;
  m.id = id;
  m.width = width;
  m.height = height;
  m.bbox = BoundingBox{width, height, -1, -1};
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      auto & px = bitmap[static_cast<std::size_t>(v) * width + u];
      if (px != 0) {
        px = 1;
        ++m.area;
        m.bbox.u_min = std::min(m.bbox.u_min, u);
        m.bbox.v_min = std::min(m.bbox.v_min, v);
        m.bbox.u_max = std::max(m.bbox.u_max, u);
        m.bbox.v_max = std::max(m.bbox.v_max, v);
      }
    }
  }
  if (m.area == 0) {
    m.bbox = BoundingBox{};
  }
  m.bitmap = std::move(bitmap);
  return m;
}

bool rasterize_membership(const Mask & mask, const PixelCoord & coord)
{
  const double fu = std::floor(coord.u);
  const double fv = std::floor(coord.v);
  if (!(fu >= 0.0 && fv >= 0.0 && fu < mask.width && fv < mask.height)) {
    return false;
  }
  return mask.at(static_cast<int>(fu), static_cast<int>(fv));
}

MaskSet::MaskSet(int width, int height, std::vector<Mask> masks)
: width_(width), height_(height), masks_(std::move(masks))
{
  if (masks_.empty()) {
    throw EmptyMaskSet("mask set is empty");
  }
  std::set<int> ids;
  for (const auto & m : masks_) {
    if (m.width != width_ || m.height != height_) {
      throw DimensionMismatch(
        "mask " + std::to_string(m.id) + " is " + std::to_string(m.width) + "x" +
        std::to_string(m.height) + ", expected " + std::to_string(width_) + "x" +
        std::to_string(height_));
    }
    if (!ids.insert(m.id).second) {
      throw IoError("duplicate mask id " + std::to_string(m.id));
    }
  }

  const std::size_t npix = static_cast<std::size_t>(width_) * height_;
  std::vector<std::uint32_t> counts(npix, 0);
  for (const auto & m : masks_) {
    for (std::size_t p = 0; p < npix; ++p) {
      counts[p] += m.bitmap[p];
    }
  }
  pixel_offsets_.assign(npix + 1, 0);
  std::size_t multi = 0;
  for (std::size_t p = 0; p < npix; ++p) {
    pixel_offsets_[p + 1] = pixel_offsets_[p] + counts[p];
    multi += counts[p] >= 2 ? 1 : 0;
  }
  overlap_ratio_ = static_cast<double>(multi) / static_cast<double>(npix);
  pixel_entries_.resize(pixel_offsets_.back());
  std::vector<std::uint32_t> cursor(pixel_offsets_.begin(), pixel_offsets_.end() - 1);
  for (std::uint32_t mi = 0; mi < masks_.size(); ++mi) {
    const auto & bm = masks_[mi].bitmap;
    for (std::size_t p = 0; p < npix; ++p) {
      if (bm[p]) {
        pixel_entries_[cursor[p]++] = mi;
      }
    }
  }
}

std::vector<std::uint8_t> decode_rle(std::span<const std::int64_t> counts, int width, int height)
{
  const std::size_t total = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> bitmap;
  bitmap.reserve(total);
  std::uint8_t value = 0;
  for (const std::int64_t run : counts) {
    if (run < 0 || bitmap.size() + static_cast<std::size_t>(run) > total) {
      throw IoError("RLE counts overflow the image");
    }
    bitmap.insert(bitmap.end(), static_cast<std::size_t>(run), value);
    value ^= 1;
  }
  if (bitmap.size() != total) {
    throw IoError("RLE counts do not cover the image");
  }
  return bitmap;
}

std::vector<std::int64_t> encode_rle(std::span<const std::uint8_t> bitmap)
{
  std::vector<std::int64_t> counts;
  std::uint8_t value = 0;
  std::int64_t run = 0;
  for (const std::uint8_t px : bitmap) {
    const std::uint8_t bit = px != 0 ? 1 : 0;
    if (bit != value) {
      counts.push_back(run);
      run = 0;
      value = bit;
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

MaskSet parse_manifest(const std::string & text, const MaskLoadOptions & opts)
{
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception & e) {
    throw IoError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("masks") || !doc["masks"].is_array()) {
    throw IoError("manifest must be an object with a 'masks' array");
  }
  int width = doc.value("width", -1);
  int height = doc.value("height", -1);
  std::vector<Mask> masks;
  try {
    int ordinal = 0;
    for (const auto & entry : doc["masks"]) {
      int mw = width;
      int mh = height;
      if (entry.contains("size")) {
        mh = entry["size"].at(0).get<int>();
        mw = entry["size"].at(1).get<int>();
        if (width < 0) {
          width = mw;
          height = mh;
        }
        if (mw != width || mh != height) {
          throw DimensionMismatch("mask size differs from the manifest image size");
        }
      }
      if (mw <= 0 || mh <= 0) {
        throw IoError("manifest lacks a positive width/height");
      }
      const auto counts = entry.at("counts").get<std::vector<std::int64_t>>();
      const int id = entry.value("id", ordinal);
      masks.push_back(Mask::from_bitmap(id, mw, mh, decode_rle(counts, mw, mh)));
      ++ordinal;
    }
  } catch (const nlohmann::json::exception & e) {
    throw IoError(std::string("malformed manifest entry: ") + e.what());
  }
  std::size_t dropped = 0;
  masks = finalize(std::move(masks), opts, dropped);
  if (masks.empty()) {
    throw EmptyMaskSet("no mask survives the minimum-area filter");
  }
  MaskSet set(width, height, std::move(masks));
  set.set_dropped_count(dropped);
  return set;
}

std::vector<std::uint8_t> read_pgm_binary(
  const std::filesystem::path & path, int & width, int & height)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P5" && magic != "P2") {
    throw IoError(path.string() + ": not a PGM image (P2/P5)");
  }
  width = read_pnm_int(in, path);
  height = read_pnm_int(in, path);
  const int maxval = read_pnm_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError(path.string() + ": invalid PGM dimensions");
  }
  const std::size_t npix = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> bitmap(npix, 0);
  if (magic == "P2") {
    for (std::size_t i = 0; i < npix; ++i) {
      bitmap[i] = read_pnm_int(in, path) > 0 ? 1 : 0;
    }
    return bitmap;
  }
  in.get();  // single whitespace byte after maxval
  const std::size_t bpp = maxval > 255 ? 2 : 1;
  std::vector<char> raw(npix * bpp);
  if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) {
    throw IoError(path.string() + ": truncated PGM data");
  }
  for (std::size_t i = 0; i < npix; ++i) {
    bool set = raw[i * bpp] != 0;
    if (bpp == 2) {
      set = set || raw[i * bpp + 1] != 0;
    }
    bitmap[i] = set ? 1 : 0;
  }
  return bitmap;
}

MaskSet load_masks(const std::filesystem::path & path, const MaskLoadOptions & opts)
{
  namespace fs = std::filesystem;
  if (!fs::exists(path)) {
    throw IoError("mask path does not exist: " + path.string());
  }
  auto read_text = [](const fs::path & p) {
    std::ifstream in(p);
    if (!in) {
      throw IoError("cannot open " + p.string());
    }
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  if (fs::is_regular_file(path)) {
    return parse_manifest(read_text(path), opts);
  }

  std::vector<fs::path> files;
  for (const auto & entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && starts_with(entry.path().filename().string(), "mask_")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    if (fs::is_regular_file(path / "masks.json")) {
      return parse_manifest(read_text(path / "masks.json"), opts);
    }
    throw EmptyMaskSet("no mask_* images or masks.json in " + path.string());
  }

  std::vector<Mask> masks;
  int width = -1;
  int height = -1;
  int ordinal = 0;
  for (const auto & file : files) {
    int w = 0;
    int h = 0;
    auto bitmap = read_pgm_binary(file, w, h);
    if (width < 0) {
      width = w;
      height = h;
    } else if (w != width || h != height) {
      throw DimensionMismatch(file.string() + " differs in size from the first mask");
    }
    const std::string digits = file.stem().string().substr(5);
    int id = ordinal;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc() || ptr != digits.data() + digits.size()) {
      id = ordinal;
    }
    masks.push_back(Mask::from_bitmap(id, w, h, std::move(bitmap)));
    ++ordinal;
  }
  std::size_t dropped = 0;
  masks = finalize(std::move(masks), opts, dropped);
  if (masks.empty()) {
    throw EmptyMaskSet("no mask survives the minimum-area filter");
  }
  MaskSet set(width, height, std::move(masks));
  set.set_dropped_count(dropped);
  return set;
}

std::string encode_manifest(const MaskSet & masks)
{
  ordered_json doc;
  doc["width"] = masks.width();
  doc["height"] = masks.height();
  doc["masks"] = ordered_json::array();
  for (const auto & m : masks.masks()) {
    ordered_json entry;
    entry["id"] = m.id;
    entry["counts"] = encode_rle(m.bitmap);
    doc["masks"].push_back(std::move(entry));
  }
  return doc.dump();
}

void save_manifest(const MaskSet & masks, const std::filesystem::path & path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << encode_manifest(masks);
}

void save_mask_images(const MaskSet & masks, const std::filesystem::path & dir)
{
  std::filesystem::create_directories(dir);
  for (const auto & m : masks.masks()) {
    char name[32];
    std::snprintf(name, sizeof(name), "mask_%04d.pgm", m.id);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
      throw IoError("cannot write " + (dir / name).string());
    }
    out << "P5\n" << m.width << ' ' << m.height << "\n255\n";
    std::vector<char> row(m.bitmap.size());
    std::transform(m.bitmap.begin(), m.bitmap.end(), row.begin(), [](std::uint8_t b) {
      return static_cast<char>(b ? 255 : 0);
    });
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace segcalib
