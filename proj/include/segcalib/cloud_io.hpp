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

#include <filesystem>

namespace segcalib
{

/// A point cloud read from disk, with flags telling which attributes the file carried.
struct CloudFile
{
  PointCloud cloud;
  bool has_normals{false};
  bool has_labels{false};
};

/// Raw little-endian float32 quadruples x, y, z, intensity (KITTI velodyne layout).
CloudFile load_cloud_bin(const std::filesystem::path & path);

/// ASCII point-cloud file whose header FIELDS include at least x y z intensity.
/// Optional normal_x normal_y normal_z and label columns are picked up when present.
CloudFile load_cloud_pcd(const std::filesystem::path & path);

/// Dispatches on extension: ".bin" -> binary quadruples, anything else -> ASCII header format.
CloudFile load_cloud(const std::filesystem::path & path);

void save_cloud_bin(const PointCloud & cloud, const std::filesystem::path & path);

/// Writes every attribute with shortest round-trip number formatting, so reloading is exact.
void save_cloud_pcd(const PointCloud & cloud, const std::filesystem::path & path);

}  // namespace segcalib
