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

#include "segcalib/cli.hpp"

#include "segcalib/cloud_io.hpp"
#include "segcalib/config.hpp"
#include "segcalib/errors.hpp"
#include "segcalib/mask_io.hpp"
#include "segcalib/overlay.hpp"
#include "segcalib/preprocess.hpp"
#include "segcalib/scene_synth.hpp"
#include "segcalib/search.hpp"
#include "segcalib/transform_io.hpp"

#include "CLI11.hpp"

#include <array>
#include <charconv>
#include <deque>
#include <fstream>
#include <optional>
#include <sstream>

namespace segcalib::cli
{

namespace
{

namespace fs = std::filesystem;

/// Thrown for argument combinations CLI11 cannot express; maps to exit 64.
class UsageError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v)
{
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct CommonArgs
{
  std::vector<std::string> clouds;
  std::vector<std::string> masks;
  std::string intrinsics;
  std::string extrinsic;
  std::string config;
  std::string out;
};

struct LoadedFrames
{
  std::deque<PointCloud> clouds;
  std::deque<MaskSet> masks;
  std::vector<Scorer> scorers;
};

RunConfig merge_config(const CommonArgs & args)
{
  RunConfig cfg = args.config.empty() ? RunConfig{} : load_run_config(args.config);
  if (args.clouds.size() != args.masks.size()) {
    throw UsageError(
      "--cloud and --masks must be given the same number of times (" +
      std::to_string(args.clouds.size()) + " vs " + std::to_string(args.masks.size()) + ")");
  }
  if (!args.clouds.empty()) {
    cfg.frames.clear();
    for (std::size_t i = 0; i < args.clouds.size(); ++i) {
      cfg.frames.push_back({args.clouds[i], args.masks[i]});
    }
  }
  if (!args.intrinsics.empty()) {
    cfg.intrinsics = args.intrinsics;
  }
  if (!args.extrinsic.empty()) {
    cfg.init = args.extrinsic;
  }
  if (!args.out.empty()) {
    cfg.out = args.out;
  }
  if (cfg.frames.empty()) {
    throw UsageError("at least one --cloud/--masks pair is required");
  }
  if (cfg.intrinsics.empty()) {
    throw UsageError("--intrinsics is required");
  }
  if (cfg.init.empty()) {
    throw UsageError("an initial extrinsic is required");
  }
  cfg.check_paths();
  return cfg;
}

Intrinsics load_intrinsics(const fs::path & path)
{
  const TransformDoc doc = load_transform_doc(path);
  if (!doc.intrinsics) {
    throw IoError(path.string() + " has no K/width/height");
  }
  return *doc.intrinsics;
}

Extrinsic load_extrinsic(const fs::path & path)
{
  const TransformDoc doc = load_transform_doc(path);
  if (!doc.extrinsic) {
    throw IoError(path.string() + " has no T");
  }
  return *doc.extrinsic;
}

PointCloud load_attributed_cloud(const fs::path & path, const RunConfig & cfg)
{
  CloudFile file = load_cloud(path);
  if (file.has_normals && file.has_labels && !cfg.force_preprocess) {
    return std::move(file.cloud);
  }
  return preprocess(file.cloud, cfg.preprocess);
}

LoadedFrames load_frames(const RunConfig & cfg, const Intrinsics & intrinsics, std::ostream & err)
{
  LoadedFrames frames;
  const MaskLoadOptions mask_opts{cfg.min_mask_area};
  for (const auto & f : cfg.frames) {
    frames.clouds.push_back(load_attributed_cloud(f.cloud, cfg));
    frames.masks.push_back(load_masks(f.masks, mask_opts));
    if (frames.masks.back().dropped_count() > 0) {
      err << "warning: " << frames.masks.back().dropped_count() << " mask(s) in " << f.masks
          << " below " << cfg.min_mask_area << " px were dropped\n";
    }
  }
  for (std::size_t i = 0; i < frames.clouds.size(); ++i) {
    frames.scorers.emplace_back(frames.clouds[i], frames.masks[i], intrinsics, cfg.score);
  }
  return frames;
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
}

std::string format_extrinsic(const Extrinsic & e)
{
  std::ostringstream out;
  const Eigen::Matrix4d m = e.matrix();
  for (int r = 0; r < 4; ++r) {
    out << "  ";
    for (int c = 0; c < 4; ++c) {
      out << (c ? " " : "") << fmt(m(r, c));
    }
    out << '\n';
  }
  return out.str();
}

void add_frame_options(CLI::App & cmd, CommonArgs & args)
{
  cmd.add_option("--cloud", args.clouds, "point cloud file (repeatable)");
  cmd.add_option("--masks", args.masks, "mask manifest or directory (repeatable, paired by order)");
  cmd.add_option("--intrinsics", args.intrinsics, "document with K, width, height");
  cmd.add_option("--config", args.config, "JSON run configuration");
}

int cmd_calibrate(const CommonArgs & args, std::ostream & out, std::ostream & err)
{
  RunConfig cfg = merge_config(args);
  if (cfg.out.empty()) {
    throw UsageError("--out is required");
  }
  const Intrinsics intrinsics = load_intrinsics(cfg.intrinsics);
  const Extrinsic init = load_extrinsic(cfg.init);
  LoadedFrames frames = load_frames(cfg, intrinsics, err);

  const CalibrationResult result = calibrate(init, frames.scorers, cfg.search);

  fs::create_directories(cfg.out);
  save_transform_doc(TransformDoc{result.extrinsic, intrinsics}, cfg.out / "extrinsic.json");
  std::string report_text;
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    report_text += "frame " + std::to_string(i) + "\n" + format_score_report(result.reports[i]);
  }
  write_text(cfg.out / "score.txt", report_text);
  write_text(cfg.out / "trace.csv", result.trace.to_csv());

  out << "initial score " << fmt(result.initial_score) << "\n"
      << "final score " << fmt(result.final_score) << "\n"
      << "evaluations " << result.trace.records.size() << "\n"
      << "extrinsic\n"
      << format_extrinsic(result.extrinsic);
  return kExitOk;
}

int cmd_score(const CommonArgs & args, std::ostream & out, std::ostream & err)
{
  RunConfig cfg = merge_config(args);
  const Intrinsics intrinsics = load_intrinsics(cfg.intrinsics);
  const Extrinsic extrinsic = load_extrinsic(cfg.init);
  LoadedFrames frames = load_frames(cfg, intrinsics, err);
  bool overlap = false;
  const double mean = mean_score(frames.scorers, extrinsic, &overlap);
  std::string text = "mean " + fmt(mean) + "\n";
  for (std::size_t i = 0; i < frames.scorers.size(); ++i) {
    text += "frame " + std::to_string(i) + "\n" +
            format_score_report(frames.scorers[i].evaluate(extrinsic));
  }
  out << text;
  if (!cfg.out.empty()) {
    write_text(cfg.out, text);
  }
  if (!overlap) {
    err << "error: no point projects into any mask\n";
    return kExitNoOverlap;
  }
  return kExitOk;
}

int cmd_overlay(const CommonArgs & args, std::ostream & out, std::ostream & err)
{
  RunConfig cfg = merge_config(args);
  if (cfg.frames.size() != 1) {
    throw UsageError("overlay renders exactly one --cloud/--masks pair");
  }
  if (cfg.out.empty()) {
    throw UsageError("--out is required");
  }
  const Intrinsics intrinsics = load_intrinsics(cfg.intrinsics);
  const Extrinsic extrinsic = load_extrinsic(cfg.init);
  LoadedFrames frames = load_frames(cfg, intrinsics, err);
  const RgbImage image = render_overlay(
    frames.clouds.front(), frames.masks.front(), intrinsics, extrinsic, cfg.score.min_depth);
  write_ppm(image, cfg.out);
  out << "wrote " << cfg.out.string() << " (" << image.width << "x" << image.height << ")\n";
  return kExitOk;
}

int cmd_synth(
  const std::string & spec_path, const std::string & out_dir, std::optional<std::uint64_t> seed,
  const std::string & mask_format, std::ostream & out)
{
  SceneSpec spec = spec_path.empty() ? SceneSpec{} : load_scene_spec(spec_path);
  if (seed) {
    spec.rng_seed = *seed;
  }
  const SyntheticScene scene = generate(spec);
  const SceneFiles files = save_scene(
    scene, out_dir, mask_format == "pgm" ? MaskFormat::kImages : MaskFormat::kManifest);
  out << "points " << scene.cloud.size() << "\n"
      << "masks " << scene.masks.size() << "\n"
      << "cloud " << files.cloud.string() << "\n"
      << "masks_path " << files.masks.string() << "\n"
      << "calibration " << files.calibration.string() << "\n";
  return kExitOk;
}

}  // namespace

std::string format_score_report(const ScoreReport & report)
{
  std::ostringstream out;
  out << "total " << fmt(report.total) << "\n"
      << "points_projected " << report.points_projected << "\n"
      << "no_overlap " << (report.no_overlap ? 1 : 0) << "\n"
      << "mask_id n score f_reflectivity f_normal f_class f_adjust\n";
  for (const auto & m : report.per_mask) {
    out << m.mask_id << ' ' << m.n << ' ' << fmt(m.score) << ' ' << fmt(m.f_reflectivity) << ' '
        << fmt(m.f_normal) << ' ' << fmt(m.f_class) << ' ' << fmt(m.f_adjust) << '\n';
  }
  return out.str();
}

int run(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"LiDAR-camera extrinsic calibration from segmentation-mask consistency"};
  app.require_subcommand(1);

  CommonArgs calib_args;
  auto * calib = app.add_subcommand("calibrate", "search for the extrinsic maximizing the score");
  add_frame_options(*calib, calib_args);
  calib->add_option("--init", calib_args.extrinsic, "document with the initial T");
  calib->add_option("--out", calib_args.out, "output directory");

  CommonArgs score_args;
  auto * score_cmd = app.add_subcommand("score", "evaluate the score of one extrinsic");
  add_frame_options(*score_cmd, score_args);
  score_cmd->add_option("--extrinsic,--init", score_args.extrinsic, "document with T");
  score_cmd->add_option("--out", score_args.out, "optional report file");

  CommonArgs overlay_args;
  auto * overlay = app.add_subcommand("overlay", "render masks and projected points as PPM");
  add_frame_options(*overlay, overlay_args);
  overlay->add_option("--extrinsic,--init", overlay_args.extrinsic, "document with T");
  overlay->add_option("--out", overlay_args.out, "output .ppm path");

  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string mask_format = "manifest";
  auto * synth = app.add_subcommand("synth", "write a synthetic scene with known extrinsic");
  synth->add_option("--spec", spec_path, "scene spec JSON (defaults when omitted)");
  synth->add_option("--out-dir", out_dir, "output directory")->required();
  synth->add_option("--seed", seed, "overrides the spec seed");
  synth->add_option("--mask-format", mask_format, "manifest or pgm")
    ->check(CLI::IsMember({"manifest", "pgm"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (calib->parsed()) {
      return cmd_calibrate(calib_args, out, err);
    }
    if (score_cmd->parsed()) {
      return cmd_score(score_args, out, err);
    }
    if (overlay->parsed()) {
      return cmd_overlay(overlay_args, out, err);
    }
    return cmd_synth(spec_path, out_dir, seed, mask_format, out);
  } catch (const UsageError & e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NoOverlap & e) {
    err << "error: NoOverlap: " << e.what() << "\n";
    return kExitNoOverlap;
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace segcalib::cli
