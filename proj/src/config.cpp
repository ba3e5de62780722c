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

#include "segcalib/config.hpp"

#include "segcalib/errors.hpp"
#include "segcalib/transform_io.hpp"

#include "json.hpp"

#include <fstream>
#include <iterator>
#include <set>

namespace segcalib
{

namespace
{

using ordered_json = nlohmann::ordered_json;

void reject_unknown(
  const ordered_json & obj, const std::set<std::string> & allowed, const std::string & where)
{
  if (!obj.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  for (const auto & [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_if(const ordered_json & obj, const char * key, T & dst)
{
  if (obj.contains(key)) {
    dst = obj.at(key).get<T>();
  }
}

std::string read_text(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void parse_preprocess(const ordered_json & j, PreprocessConfig & c)
{
  reject_unknown(
    j,
    {"knn_k", "intensity_scale", "ransac_dist", "ransac_iters", "min_plane_inlier_frac",
     "max_planes", "cluster_tolerance", "min_cluster_size", "ransac_seed"},
    "preprocess");
  read_if(j, "knn_k", c.knn_k);
  if (j.contains("intensity_scale")) {
    const auto & s = j["intensity_scale"];
    if (s.is_string()) {
      if (s.get<std::string>() != "auto") {
        throw ConfigError("intensity_scale must be a number or \"auto\"");
      }
      c.intensity_scale.reset();
    } else {
      c.intensity_scale = s.get<double>();
    }
  }
  read_if(j, "ransac_dist", c.ransac_dist);
  read_if(j, "ransac_iters", c.ransac_iters);
  read_if(j, "min_plane_inlier_frac", c.min_plane_inlier_frac);
  read_if(j, "max_planes", c.max_planes);
  read_if(j, "cluster_tolerance", c.cluster_tolerance);
  read_if(j, "min_cluster_size", c.min_cluster_size);
  read_if(j, "ransac_seed", c.ransac_seed);
}

void parse_score(const ordered_json & j, ScoreConfig & c)
{
  reject_unknown(
    j, {"w_r", "w_n", "w_s", "k_class", "k1", "k2", "n_min", "n_cap", "min_depth"}, "score");
  read_if(j, "w_r", c.w_r);
  read_if(j, "w_n", c.w_n);
  read_if(j, "w_s", c.w_s);
  read_if(j, "k_class", c.k_class);
  read_if(j, "k1", c.k1);
  read_if(j, "k2", c.k2);
  read_if(j, "n_min", c.n_min);
  read_if(j, "n_cap", c.n_cap);
  read_if(j, "min_depth", c.min_depth);
}

void parse_search(const ordered_json & j, SearchConfig & c)
{
  reject_unknown(
    j,
    {"rot_range_deg", "rot_stride_deg", "refine_rot_range_deg", "refine_trans_range_m",
     "refine_samples", "rounds", "range_shrink", "rng_seed"},
    "search");
  read_if(j, "rot_range_deg", c.rot_range_deg);
  read_if(j, "rot_stride_deg", c.rot_stride_deg);
  read_if(j, "refine_rot_range_deg", c.refine_rot_range_deg);
  read_if(j, "refine_trans_range_m", c.refine_trans_range_m);
  read_if(j, "refine_samples", c.refine_samples);
  read_if(j, "rounds", c.rounds);
  read_if(j, "range_shrink", c.range_shrink);
  read_if(j, "rng_seed", c.rng_seed);
}

}  // namespace

void RunConfig::validate() const
{
  preprocess.validate();
  score.validate();
  search.validate();
}

void RunConfig::check_paths() const
{
  auto must_exist = [](const std::filesystem::path & p, const char * what) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw IoError(std::string(what) + " not found: " + p.string());
    }
  };
  for (const auto & f : frames) {
    must_exist(f.cloud, "cloud");
    must_exist(f.masks, "masks");
  }
  must_exist(intrinsics, "intrinsics");
  must_exist(init, "initial extrinsic");
}

RunConfig parse_run_config(const std::string & text)
{
  RunConfig cfg;
  try {
    const ordered_json j = ordered_json::parse(text);
    reject_unknown(
      j,
      {"preprocess", "score", "search", "min_mask_area", "force_preprocess", "frames",
       "intrinsics", "init", "out"},
      "config");
    if (j.contains("preprocess")) {
      parse_preprocess(j["preprocess"], cfg.preprocess);
    }
    if (j.contains("score")) {
      parse_score(j["score"], cfg.score);
    }
    if (j.contains("search")) {
      parse_search(j["search"], cfg.search);
    }
    read_if(j, "min_mask_area", cfg.min_mask_area);
    read_if(j, "force_preprocess", cfg.force_preprocess);
    if (j.contains("frames")) {
      for (const auto & f : j["frames"]) {
        reject_unknown(f, {"cloud", "masks"}, "frames entry");
        cfg.frames.push_back(
          {f.at("cloud").get<std::string>(), f.at("masks").get<std::string>()});
      }
    }
    if (j.contains("intrinsics")) {
      cfg.intrinsics = j["intrinsics"].get<std::string>();
    }
    if (j.contains("init")) {
      cfg.init = j["init"].get<std::string>();
    }
    if (j.contains("out")) {
      cfg.out = j["out"].get<std::string>();
    }
  } catch (const nlohmann::json::exception & e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path & path)
{
  return parse_run_config(read_text(path));
}

std::string encode_run_config(const RunConfig & cfg)
{
  ordered_json j;
  const auto & p = cfg.preprocess;
  j["preprocess"] = {
    {"knn_k", p.knn_k},
    {"intensity_scale", p.intensity_scale ? ordered_json(*p.intensity_scale) : ordered_json("auto")},
    {"ransac_dist", p.ransac_dist},
    {"ransac_iters", p.ransac_iters},
    {"min_plane_inlier_frac", p.min_plane_inlier_frac},
    {"max_planes", p.max_planes},
    {"cluster_tolerance", p.cluster_tolerance},
    {"min_cluster_size", p.min_cluster_size},
    {"ransac_seed", p.ransac_seed}};
  const auto & s = cfg.score;
  j["score"] = {{"w_r", s.w_r},     {"w_n", s.w_n},     {"w_s", s.w_s},
                {"k_class", s.k_class}, {"k1", s.k1},   {"k2", s.k2},
                {"n_min", s.n_min}, {"n_cap", s.n_cap}, {"min_depth", s.min_depth}};
  const auto & r = cfg.search;
  j["search"] = {
    {"rot_range_deg", r.rot_range_deg},
    {"rot_stride_deg", r.rot_stride_deg},
    {"refine_rot_range_deg", r.refine_rot_range_deg},
    {"refine_trans_range_m", r.refine_trans_range_m},
    {"refine_samples", r.refine_samples},
    {"rounds", r.rounds},
    {"range_shrink", r.range_shrink},
    {"rng_seed", r.rng_seed}};
  j["min_mask_area"] = cfg.min_mask_area;
  j["force_preprocess"] = cfg.force_preprocess;
  j["frames"] = ordered_json::array();
  for (const auto & f : cfg.frames) {
    j["frames"].push_back({{"cloud", f.cloud.string()}, {"masks", f.masks.string()}});
  }
  j["intrinsics"] = cfg.intrinsics.string();
  j["init"] = cfg.init.string();
  j["out"] = cfg.out.string();
  return j.dump(2) + "\n";
}

SceneSpec parse_scene_spec(const std::string & text)
{
  SceneSpec spec;
  try {
    const ordered_json j = ordered_json::parse(text);
    reject_unknown(
      j,
      {"n_planes", "n_clusters", "points_per_element", "noise_frac", "seed", "mask_dilation_px",
       "derive_attributes", "intensity", "K", "width", "height", "T"},
      "scene spec");
    read_if(j, "n_planes", spec.n_planes);
    read_if(j, "n_clusters", spec.n_clusters);
    read_if(j, "points_per_element", spec.points_per_element);
    read_if(j, "noise_frac", spec.noise_frac);
    read_if(j, "seed", spec.rng_seed);
    read_if(j, "mask_dilation_px", spec.mask_dilation_px);
    read_if(j, "derive_attributes", spec.derive_attributes);
    if (j.contains("intensity")) {
      for (const auto & p : j["intensity"]) {
        reject_unknown(p, {"mean", "spread"}, "intensity profile");
        spec.intensity.push_back({p.at("mean").get<double>(), p.at("spread").get<double>()});
      }
    }
    ordered_json camera = ordered_json::object();
    for (const char * key : {"K", "width", "height", "T"}) {
      if (j.contains(key)) {
        camera[key] = j[key];
      }
    }
    const TransformDoc doc = parse_transform_doc(camera.dump());
    if (doc.intrinsics) {
      spec.intrinsics = *doc.intrinsics;
    }
    if (doc.extrinsic) {
      spec.ground_truth = *doc.extrinsic;
    }
  } catch (const nlohmann::json::exception & e) {
    throw InvalidSpec(std::string("malformed scene spec: ") + e.what());
  } catch (const ConfigError & e) {
    throw InvalidSpec(e.what());
  } catch (const IoError & e) {
    throw InvalidSpec(e.what());
  }
  spec.validate();
  return spec;
}

SceneSpec load_scene_spec(const std::filesystem::path & path)
{
  return parse_scene_spec(read_text(path));
}

}  // namespace segcalib
