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
#include "segcalib/scene_synth.hpp"
#include "segcalib/types.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

namespace segcalib::test
{

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
  explicit TempDir(const std::string & tag)
  {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("segcalib_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir()
  {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  const std::filesystem::path & path() const { return path_; }
  std::filesystem::path operator/(const std::string & name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline Point make_point(
  const Eigen::Vector3d & position, const Eigen::Vector3d & normal = Eigen::Vector3d::UnitZ(),
  double reflectivity = 0.5, int label = 0)
{
  Point p;
  p.position = position;
  p.normal = normal;
  p.reflectivity = reflectivity;
  p.label = label;
  return p;
}

inline Mask full_mask(int id, int w, int h)
{
  return Mask::from_bitmap(id, w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h, 1));
}

/// Mask covering columns [u0, u1) of every row.
inline Mask column_mask(int id, int w, int h, int u0, int u1)
{
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
  for (int v = 0; v < h; ++v) {
    for (int u = u0; u < u1; ++u) {
      bits[static_cast<std::size_t>(v) * w + u] = 1;
    }
  }
  return Mask::from_bitmap(id, w, h, std::move(bits));
}

/// Default layout with fewer points per element; keeps search tests fast.
inline SceneSpec light_spec(std::uint64_t seed = 0)
{
  SceneSpec spec;
  spec.points_per_element = 1500;
  spec.rng_seed = seed;
  return spec;
}

}  // namespace segcalib::test
