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

#include "segcalib/search.hpp"

#include "segcalib/errors.hpp"
#include "segcalib/parallel.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace segcalib
{

namespace
{

std::string fmt(double v)
{
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

bool is_zero(const EulerDelta & d)
{
  return d.d_roll == 0.0 && d.d_pitch == 0.0 && d.d_yaw == 0.0 && d.d_tx == 0.0 &&
         d.d_ty == 0.0 && d.d_tz == 0.0;
}

struct Evaluated
{
  double score;
  bool overlap;
};

// Scores every delta around `base`; slot i depends only on deltas[i].
std::vector<Evaluated> evaluate_all(
  const Extrinsic & base, std::span<const Scorer> frames, const std::vector<EulerDelta> & deltas)
{
  std::vector<Evaluated> out(deltas.size());
  parallel_for(deltas.size(), [&](std::size_t i) {
    bool overlap = false;
    const double s = mean_score(frames, compose_delta(base, deltas[i]), &overlap);
    out[i] = {s, overlap};
  });
  return out;
}

// Incumbent-wins-ties argmax over candidates in index order, recording the trace.
SearchResult reduce(
  const Extrinsic & init, double init_score, const std::vector<EulerDelta> & deltas,
  const std::vector<Evaluated> & scores, const std::string & phase, std::size_t round,
  SearchTrace trace)
{
  double best = init_score;
  std::size_t best_idx = deltas.size();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (scores[i].score > best) {
      best = scores[i].score;
      best_idx = i;
    }
    trace.records.push_back({phase, round, deltas[i], scores[i].score, best});
  }
  SearchResult result{init, init_score, std::move(trace)};
  if (best_idx < deltas.size()) {
    result.extrinsic = compose_delta(init, deltas[best_idx]);
    result.score = best;
  }
  return result;
}

SearchResult refine_from(
  const Extrinsic & init, double init_score, std::span<const Scorer> frames,
  const SearchConfig & cfg, double round_scale, std::uint64_t stream, std::size_t round)
{
  const double rot = cfg.refine_rot_range_deg * round_scale;
  const double trans = cfg.refine_trans_range_m * round_scale;
  std::seed_seq seq{
    static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> rot_dist(-rot, rot);
  std::uniform_real_distribution<double> trans_dist(-trans, trans);
  std::vector<EulerDelta> deltas(cfg.refine_samples);
  for (auto & d : deltas) {
    d.d_roll = rot_dist(rng);
    d.d_pitch = rot_dist(rng);
    d.d_yaw = rot_dist(rng);
    d.d_tx = trans_dist(rng);
    d.d_ty = trans_dist(rng);
    d.d_tz = trans_dist(rng);
  }
  const auto scores = evaluate_all(init, frames, deltas);
  return reduce(init, init_score, deltas, scores, "refine", round, {});
}

}  // namespace

void SearchConfig::validate() const
{
  if (!(rot_stride_deg > 0.0)) {
    throw ConfigError("rot_stride_deg must be positive");
  }
  if (!(rot_range_deg >= 0.0) || !(refine_rot_range_deg >= 0.0) ||
      !(refine_trans_range_m >= 0.0)) {
    throw ConfigError("search ranges must be non-negative");
  }
  if (rounds < 1) {
    throw ConfigError("rounds must be >= 1");
  }
  if (!(range_shrink > 0.0)) {
    throw ConfigError("range_shrink must be positive");
  }
}

void SearchTrace::append(const SearchTrace & other)
{
  const double carried = records.empty() ? -1.0 : records.back().best;
  for (auto rec : other.records) {
    rec.best = std::max(rec.best, carried);
    records.push_back(rec);
  }
}

std::string SearchTrace::to_csv() const
{
  std::ostringstream out;
  out << "phase,round,d_roll,d_pitch,d_yaw,d_tx,d_ty,d_tz,score,best\n";
  for (const auto & r : records) {
    out << r.phase << ',' << r.round << ',' << fmt(r.delta.d_roll) << ',' << fmt(r.delta.d_pitch)
        << ',' << fmt(r.delta.d_yaw) << ',' << fmt(r.delta.d_tx) << ',' << fmt(r.delta.d_ty) << ','
        << fmt(r.delta.d_tz) << ',' << fmt(r.score) << ',' << fmt(r.best) << '\n';
  }
  return out.str();
}

double mean_score(std::span<const Scorer> frames, const Extrinsic & extrinsic, bool * any_overlap)
{
  if (frames.empty()) {
    throw EmptyInput("no frames to score");
  }
  double sum = 0.0;
  bool overlap = false;
  for (const auto & frame : frames) {
    const ScoreReport rep = frame.evaluate(extrinsic);
    sum += rep.total;
    overlap = overlap || !rep.no_overlap;
  }
  if (any_overlap) {
    *any_overlap = overlap;
  }
  return sum / static_cast<double>(frames.size());
}

SearchResult brute_force_rotation(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg)
{
  cfg.validate();
  bool init_overlap = false;
  const double init_score = mean_score(frames, init, &init_overlap);

  const auto steps =
    static_cast<std::size_t>(std::floor(2.0 * cfg.rot_range_deg / cfg.rot_stride_deg + 1e-9)) + 1;
  std::vector<double> values(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    values[i] = -cfg.rot_range_deg + static_cast<double>(i) * cfg.rot_stride_deg;
  }
  std::vector<EulerDelta> deltas;
  deltas.reserve(steps * steps * steps);
  for (const double roll : values) {
    for (const double pitch : values) {
      for (const double yaw : values) {
        EulerDelta d{roll, pitch, yaw, 0.0, 0.0, 0.0};
        if (!is_zero(d)) {
          deltas.push_back(d);
        }
      }
    }
  }
  const auto scores = evaluate_all(init, frames, deltas);
  bool any_overlap = init_overlap;
  for (const auto & s : scores) {
    any_overlap = any_overlap || s.overlap;
  }
  if (!any_overlap) {
    throw NoOverlap("no candidate rotation projects any point into a mask");
  }
  SearchTrace trace;
  trace.records.push_back({"init", 0, EulerDelta{}, init_score, init_score});
  return reduce(init, init_score, deltas, scores, "grid", 0, std::move(trace));
}

SearchResult random_refine(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg,
  double round_scale, std::uint64_t stream)
{
  cfg.validate();
  const double init_score = mean_score(frames, init);
  SearchResult result = refine_from(init, init_score, frames, cfg, round_scale, stream, 1);
  SearchTrace trace;
  trace.records.push_back({"init", 0, EulerDelta{}, init_score, init_score});
  trace.append(result.trace);
  result.trace = std::move(trace);
  return result;
}

CalibrationResult calibrate(
  const Extrinsic & init, std::span<const Scorer> frames, const SearchConfig & cfg)
{
  cfg.validate();
  bool overlap = false;
  const double init_score = mean_score(frames, init, &overlap);
  if (!overlap) {
    throw NoOverlap("the initial extrinsic projects no point into any mask");
  }

  SearchResult current = brute_force_rotation(init, frames, cfg);
  SearchTrace trace = std::move(current.trace);
  double scale = 1.0;
  for (std::size_t round = 1; round <= cfg.rounds; ++round) {
    SearchResult next =
      refine_from(current.extrinsic, current.score, frames, cfg, scale, round, round);
    trace.append(next.trace);
    current.extrinsic = next.extrinsic;
    current.score = next.score;
    scale *= cfg.range_shrink;
  }

  CalibrationResult result{current.extrinsic, init_score, current.score, {}, std::move(trace)};
  for (const auto & frame : frames) {
    result.reports.push_back(frame.evaluate(result.extrinsic));
  }
  return result;
}

}  // namespace segcalib
