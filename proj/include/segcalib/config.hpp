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
#include "segcalib/preprocess.hpp"
#include "segcalib/scene_synth.hpp"
#include "segcalib/scoring.hpp"
#include "segcalib/search.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace segcalib
{

struct FramePaths
{
  std::filesystem::path cloud;
  std::filesystem::path masks;

  bool operator==(const FramePaths &) const = default;
};

/// Everything one CLI run needs. Parsed from a JSON document whose unknown keys are rejected:
///
///   {"preprocess": {...}, "score": {...}, "search": {...}, "min_mask_area": 100,
///    "force_preprocess": false, "frames": [{"cloud": ..., "masks": ...}],
///    "intrinsics": ..., "init": ..., "out": ...}
struct RunConfig
{
  PreprocessConfig preprocess;
  ScoreConfig score;
  SearchConfig search;
  std::size_t min_mask_area{100};
  /// Re-run preprocessing even when the cloud file already carries normals and labels.
  bool force_preprocess{false};
  std::vector<FramePaths> frames;
  std::filesystem::path intrinsics;
  std::filesystem::path init;
  std::filesystem::path out;

  /// Range checks of every section (ConfigError).
  void validate() const;
  /// Every non-empty path must exist (IoError).
  void check_paths() const;
  bool operator==(const RunConfig &) const = default;
};

RunConfig parse_run_config(const std::string & text);
RunConfig load_run_config(const std::filesystem::path & path);
std::string encode_run_config(const RunConfig & cfg);

/// Scene spec document; every key optional, unknown keys rejected:
///   {"n_planes", "n_clusters", "points_per_element", "noise_frac", "seed",
///    "mask_dilation_px", "derive_attributes", "intensity": [{"mean", "spread"}],
///    "K", "width", "height", "T"}
SceneSpec parse_scene_spec(const std::string & text);
SceneSpec load_scene_spec(const std::filesystem::path & path);

}  // namespace segcalib
