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

#include "segcalib/scoring.hpp"
#include "segcalib/types.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace segcalib
{

struct SearchConfig
{
  /// Coarse grid half-width A and stride s, degrees.
  double rot_range_deg{5.0};
  double rot_stride_deg{1.0};
  double refine_rot_range_deg{1.0};
  double refine_trans_range_m{0.10};
  std::size_t refine_samples{1000};
  std::size_t rounds{3};
  double range_shrink{0.5};
  std::uint64_t rng_seed{0};

  void validate() const;
  bool operator==(const SearchConfig &) const = default;
};

struct TraceRecord
{
  std::string phase;  // "init", "grid" or "refine"
  std::size_t round{0};
  EulerDelta delta;
  double score{0.0};
  /// Best score seen so far, including this record.
  double best{0.0};
};

struct SearchTrace
{
  std::vector<TraceRecord> records;

  void append(const SearchTrace & other);
  /// Header plus one row per evaluation.
  std::string to_csv() const;
};

struct SearchResult
{
  Extrinsic extrinsic;
  double score{0.0};
  SearchTrace trace;
};

/// Mean total score over frames. Sets *any_overlap when at least one frame has overlap.
double mean_score(
  std::span<const Scorer> frames, const Extrinsic & extrinsic, bool * any_overlap = nullptr);

/// Exhaustive 3-DoF rotation grid in [-A, A]^3 with stride s around `init`. The incumbent wins
/// ties and the lowest grid index wins among equal candidates. Throws NoOverlap when no
/// evaluated candidate reaches any mask.
SearchResult brute_force_rotation(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg);

/// refine_samples uniform 6-DoF deltas in +-(range * round_scale) around `init`.
/// `stream` selects an independent random stream for the same rng_seed.
SearchResult random_refine(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg,
  double round_scale, std::uint64_t stream = 0);

struct CalibrationResult
{
  Extrinsic extrinsic;
  double initial_score{0.0};
  double final_score{0.0};
  /// Final per-frame reports.
  std::vector<ScoreReport> reports;
  SearchTrace trace;
};

/// One coarse rotation grid, then `rounds` random refinements with geometric range shrink.
/// Throws NoOverlap if the initial extrinsic reaches no mask in every frame.
CalibrationResult calibrate(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg);

}  // namespace segcalib
