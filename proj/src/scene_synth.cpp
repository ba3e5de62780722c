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

#include "segcalib/scene_synth.hpp"

#include "segcalib/cloud_io.hpp"
#include "segcalib/errors.hpp"
#include "segcalib/preprocess.hpp"
#include "segcalib/transform_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace segcalib
{

namespace
{

constexpr double kGroundY = 1.6;  // camera height above the ground, camera y points down
constexpr double kMinVertexDepth = 3.0;
constexpr double kMaxVertexDepth = 40.0;
constexpr std::size_t kMaxPlanes = 4;

// Board footprint centers (x, z) in the camera frame; the first n_clusters are used.
// The first eight occupy disjoint bearing bands so none hides another.
constexpr std::array<std::array<double, 2>, 12> kBoardSlots{{
  {-4.07, 5.0},
  {4.55, 5.5},
  {-3.21, 6.0},
  {3.70, 6.5},
  {-2.06, 7.0},
  {2.79, 8.0},
  {-0.82, 9.0},
  {1.66, 10.0},
  {0.4, 14.0},
  {-4.5, 16.0},
  {4.5, 18.0},
  {-1.5, 20.0},
}};

constexpr double kMinVisibleFrac = 0.5;
constexpr int kMaxLayoutAttempts = 20;

struct Face
{
  std::vector<Eigen::Vector3d> corners;  // convex, consistently ordered
  Eigen::Vector3d normal;                // unit, facing the camera
  double offset;                         // normal . X + offset = 0
  double area;
  int u_lo, u_hi, v_lo, v_hi;            // pixel bounding box of the projection
};

struct Element
{
  std::vector<Face> faces;
};

Face make_face(std::vector<Eigen::Vector3d> corners, Eigen::Vector3d normal)
{
  normal.normalize();
  Face f{std::move(corners), normal, 0.0, 0.0, 0, 0, 0, 0};
  f.offset = -normal.dot(f.corners[0]);
  for (std::size_t i = 1; i + 1 < f.corners.size(); ++i) {
    f.area += 0.5 * (f.corners[i] - f.corners[0]).cross(f.corners[i + 1] - f.corners[0]).norm();
  }
  return f;
}

Element make_quad(
  const Eigen::Vector3d & a, const Eigen::Vector3d & b, const Eigen::Vector3d & c,
  const Eigen::Vector3d & d, const Eigen::Vector3d & normal)
{
  return Element{{make_face({a, b, c, d}, normal)}};
}

std::vector<Element> make_planes(std::size_t n)
{
  const double g = kGroundY;
  std::vector<Element> planes;
  planes.push_back(make_quad(
    {-3.2, g, 3.5}, {3.2, g, 3.5}, {24.0, g, 30.0}, {-24.0, g, 30.0}, {0.0, -1.0, 0.0}));
  planes.push_back(make_quad(
    {-24.0, -8.0, 30.0}, {24.0, -8.0, 30.0}, {24.0, g, 30.0}, {-24.0, g, 30.0},
    {0.0, 0.0, -1.0}));
  planes.push_back(make_quad(
    {7.0, -3.0, 12.0}, {7.0, -3.0, 29.5}, {7.0, g, 29.5}, {7.0, g, 12.0}, {-1.0, 0.0, 0.0}));
  planes.push_back(make_quad(
    {-7.0, -3.0, 12.0}, {-7.0, -3.0, 29.5}, {-7.0, g, 29.5}, {-7.0, g, 12.0}, {1.0, 0.0, 0.0}));
  planes.resize(n);
  return planes;
}

// Upright board standing on the ground, turned by yaw_deg about the vertical axis.
Element make_board(double cx, double cz, double w, double h, double yaw_deg)
{
  const double c = std::cos(deg2rad(yaw_deg));
  const double s = std::sin(deg2rad(yaw_deg));
  const Eigen::Vector3d half(0.5 * w * c, 0.0, -0.5 * w * s);
  const Eigen::Vector3d foot(cx, kGroundY, cz);
  const Eigen::Vector3d up(0.0, -h, 0.0);
  Eigen::Vector3d normal(-s, 0.0, -c);
  if (normal.dot(-foot) < 0.0) {
    normal = -normal;
  }
  return make_quad(foot - half, foot + half, foot + half + up, foot - half + up, normal);
}

bool project_pixel(const Intrinsics & k, const Eigen::Vector3d & p, double & u, double & v)
{
  if (!(p.z() > 0.0)) {
    return false;
  }
  const Eigen::Vector3d uvw = k.k() * p;
  u = uvw.x() / uvw.z();
  v = uvw.y() / uvw.z();
  return u >= 0.0 && u < k.width() && v >= 0.0 && v < k.height();
}

void check_and_bound(Element & el, std::size_t index, const Intrinsics & k)
{
  for (auto & f : el.faces) {
    double u_lo = std::numeric_limits<double>::max();
    double v_lo = u_lo;
    double u_hi = -u_lo;
    double v_hi = -u_lo;
    for (const auto & c : f.corners) {
      double u = 0.0;
      double v = 0.0;
      if (c.z() < kMinVertexDepth || c.z() > kMaxVertexDepth || !project_pixel(k, c, u, v)) {
        throw InvalidSpec("element " + std::to_string(index) + " projects outside the image");
      }
      u_lo = std::min(u_lo, u);
      u_hi = std::max(u_hi, u);
      v_lo = std::min(v_lo, v);
      v_hi = std::max(v_hi, v);
    }
    f.u_lo = static_cast<int>(std::floor(u_lo));
    f.u_hi = static_cast<int>(std::floor(u_hi));
    f.v_lo = static_cast<int>(std::floor(v_lo));
    f.v_hi = static_cast<int>(std::floor(v_hi));
  }
}

bool inside_convex(const Face & f, const Eigen::Vector3d & x)
{
  int sign = 0;
  const std::size_t n = f.corners.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d & a = f.corners[i];
    const Eigen::Vector3d & b = f.corners[(i + 1) % n];
    const double s = f.normal.dot((b - a).cross(x - a));
    const int cur = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    if (cur != 0) {
      if (sign != 0 && cur != sign) {
        return false;
      }
      sign = cur;
    }
  }
  return true;
}

std::vector<int> render_labels(const std::vector<Element> & elements, const Intrinsics & k)
{
  const int w = k.width();
  const int h = k.height();
  const Eigen::Matrix3d k_inv = k.k().inverse();
  std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
  std::vector<double> depth(labels.size(), std::numeric_limits<double>::infinity());
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (const auto & f : elements[e].faces) {
      for (int v = std::max(0, f.v_lo); v <= std::min(h - 1, f.v_hi); ++v) {
        for (int u = std::max(0, f.u_lo); u <= std::min(w - 1, f.u_hi); ++u) {
          const Eigen::Vector3d ray = k_inv * Eigen::Vector3d(u + 0.5, v + 0.5, 1.0);
          const double denom = f.normal.dot(ray);
          if (denom == 0.0) {
            continue;
          }
          const double t = -f.offset / denom;
          const std::size_t pix = static_cast<std::size_t>(v) * w + u;
          if (!(t > 0.0) || t * ray.z() >= depth[pix]) {
            continue;
          }
          if (inside_convex(f, t * ray)) {
            depth[pix] = t * ray.z();
            labels[pix] = static_cast<int>(e);
          }
        }
      }
    }
  }
  return labels;
}

// Every board must keep at least kMinVisibleFrac of its unoccluded footprint.
bool boards_visible(
  const std::vector<Element> & elements, const std::vector<int> & labels, std::size_t first_board,
  const Intrinsics & k)
{
  std::vector<std::size_t> visible(elements.size(), 0);
  for (int l : labels) {
    if (l >= 0) {
      ++visible[static_cast<std::size_t>(l)];
    }
  }
  for (std::size_t e = first_board; e < elements.size(); ++e) {
    const std::vector<int> solo = render_labels({elements[e]}, k);
    const auto full = static_cast<std::size_t>(std::count(solo.begin(), solo.end(), 0));
    if (static_cast<double>(visible[e]) < kMinVisibleFrac * static_cast<double>(full)) {
      return false;
    }
  }
  return true;
}

std::vector<std::uint8_t> dilate(
  const std::vector<int> & labels, int target, int w, int h, int radius)
{
  std::vector<std::pair<int, int>> offsets;
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      if (du * du + dv * dv <= radius * radius) {
        offsets.emplace_back(du, dv);
      }
    }
  }
  std::vector<std::uint8_t> out(labels.size(), 0);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (labels[static_cast<std::size_t>(v) * w + u] != target) {
        continue;
      }
      for (const auto & [du, dv] : offsets) {
        const int uu = u + du;
        const int vv = v + dv;
        if (uu < 0 || uu >= w || vv < 0 || vv >= h) {
          continue;
        }
        const std::size_t pix = static_cast<std::size_t>(vv) * w + uu;
        // grow into background pixels only
        if (labels[pix] == target || labels[pix] == -1) {
          out[pix] = 1;
        }
      }
    }
  }
  return out;
}

Eigen::Vector3d sample_on_face(const Face & f, std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // fan triangulation, area weighted
  double pick = unit(rng) * f.area;
  std::size_t tri = 1;
  for (; tri + 2 < f.corners.size(); ++tri) {
    const double a =
      0.5 * (f.corners[tri] - f.corners[0]).cross(f.corners[tri + 1] - f.corners[0]).norm();
    if (pick < a) {
      break;
    }
    pick -= a;
  }
  double r1 = unit(rng);
  double r2 = unit(rng);
  if (r1 + r2 > 1.0) {
    r1 = 1.0 - r1;
    r2 = 1.0 - r2;
  }
  const Eigen::Vector3d & a = f.corners[0];
  return a + r1 * (f.corners[tri] - a) + r2 * (f.corners[tri + 1] - a);
}

}  // namespace

Extrinsic SceneSpec::default_ground_truth()
{
  Eigen::Matrix3d lidar_to_camera_axes;
  lidar_to_camera_axes << 0.0, -1.0, 0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0;
  return Extrinsic(
    rotation_from_euler_deg(0.5, -1.0, 0.8) * lidar_to_camera_axes,
    Eigen::Vector3d(0.06, -0.08, -0.27));
}

IntensityProfile SceneSpec::profile(std::size_t element) const
{
  if (element < intensity.size()) {
    return intensity[element];
  }
  // dark planes, bright boards: every board contrasts with the planes behind it
  if (element < n_planes) {
    return IntensityProfile{0.10 + 0.10 * static_cast<double>(element), 0.03};
  }
  const double frac = std::fmod(0.381966011250105 * static_cast<double>(element - n_planes), 1.0);
  return IntensityProfile{0.65 + 0.27 * frac, 0.03};
}

void SceneSpec::validate() const
{
  if (n_planes > kMaxPlanes) {
    throw InvalidSpec("at most 4 planes are supported");
  }
  if (n_clusters > kBoardSlots.size()) {
    throw InvalidSpec("at most 12 clusters are supported");
  }
  if (element_count() == 0) {
    throw InvalidSpec("scene needs at least one element");
  }
  if (points_per_element == 0) {
    throw InvalidSpec("points_per_element must be positive");
  }
  if (!(noise_frac >= 0.0 && noise_frac < 1.0)) {
    throw InvalidSpec("noise_frac must lie in [0, 1)");
  }
  if (mask_dilation_px < 0) {
    throw InvalidSpec("mask_dilation_px must be non-negative");
  }
  for (std::size_t e = 0; e < element_count(); ++e) {
    const auto p = profile(e);
    if (!(p.mean >= 0.0 && p.mean <= 1.0) || !(p.spread >= 0.0 && p.spread <= 0.05)) {
      throw InvalidSpec("intensity profile out of range for element " + std::to_string(e));
    }
  }
}

SyntheticScene generate(const SceneSpec & spec)
{
  spec.validate();
  const Intrinsics & k = spec.intrinsics;
  std::mt19937_64 rng(spec.rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  std::vector<Element> elements;
  std::vector<int> labels;
  for (int layout = 0;; ++layout) {
    elements = make_planes(spec.n_planes);
    for (std::size_t b = 0; b < spec.n_clusters; ++b) {
      const double cx = kBoardSlots[b][0] + uniform(-0.15, 0.15);
      const double cz = kBoardSlots[b][1] + uniform(-0.15, 0.15);
      const double w = uniform(0.7, 1.0);
      const double h = uniform(0.9, 1.8);
      // boards roughly face the camera
      const double yaw = rad2deg(std::atan2(cx, cz)) + uniform(-20.0, 20.0);
      elements.push_back(make_board(cx, cz, w, h, yaw));
    }
    for (std::size_t e = 0; e < elements.size(); ++e) {
      check_and_bound(elements[e], e, k);
    }
    labels = render_labels(elements, k);
    if (boards_visible(elements, labels, spec.n_planes, k)) {
      break;
    }
    if (layout + 1 == kMaxLayoutAttempts) {
      throw InvalidSpec("could not place clusters without heavy occlusion");
    }
  }

  const Extrinsic camera_to_lidar = spec.ground_truth.inverse();
  const Eigen::Matrix3d & r_cl = camera_to_lidar.rotation();

  PointCloud cloud;
  cloud.source_path = "synthetic";
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const Element & el = elements[e];
    double total_area = 0.0;
    for (const auto & f : el.faces) {
      total_area += f.area;
    }
    const IntensityProfile prof = spec.profile(e);
    std::normal_distribution<double> reflect(prof.mean, prof.spread);
    std::size_t accepted = 0;
    const std::size_t max_attempts = 50 * spec.points_per_element;
    for (std::size_t attempt = 0; attempt < max_attempts && accepted < spec.points_per_element;
         ++attempt) {
      double pick = unit(rng) * total_area;
      std::size_t fi = 0;
      while (fi + 1 < el.faces.size() && pick >= el.faces[fi].area) {
        pick -= el.faces[fi].area;
        ++fi;
      }
      const Face & face = el.faces[fi];
      const Eigen::Vector3d pc = sample_on_face(face, rng);
      const double r = std::clamp(reflect(rng), 0.0, 1.0);
      double u = 0.0;
      double v = 0.0;
      if (!project_pixel(k, pc, u, v)) {
        continue;
      }
      const std::size_t pix = static_cast<std::size_t>(v) * k.width() + static_cast<std::size_t>(u);
      if (labels[pix] != static_cast<int>(e)) {
        continue;
      }
      Point p;
      p.position = camera_to_lidar.apply(pc);
      p.normal = r_cl * face.normal;
      if (p.normal.dot(-p.position) < 0.0) {
        p.normal = -p.normal;
      }
      p.reflectivity = r;
      p.label = static_cast<int>(e);
      cloud.points.push_back(p);
      ++accepted;
    }
    if (accepted < spec.points_per_element) {
      throw InvalidSpec("element " + std::to_string(e) + " is too occluded to sample");
    }
  }

  const auto n_noise = static_cast<std::size_t>(
    std::llround(spec.noise_frac * static_cast<double>(cloud.size())));
  const Eigen::Matrix3d k_inv = k.k().inverse();
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n_noise; ++i) {
    const double u = uniform(0.0, k.width());
    const double v = uniform(0.0, k.height());
    const double depth = uniform(kMinVertexDepth, kMaxVertexDepth);
    const Eigen::Vector3d pc = depth * (k_inv * Eigen::Vector3d(u, v, 1.0));
    Eigen::Vector3d n(gauss(rng), gauss(rng), gauss(rng));
    if (n.norm() < 1e-9) {
      n = Eigen::Vector3d::UnitZ();
    }
    Point p;
    p.position = camera_to_lidar.apply(pc);
    p.normal = n.normalized();
    if (p.normal.dot(-p.position) < 0.0) {
      p.normal = -p.normal;
    }
    p.reflectivity = unit(rng);
    p.label = -1;
    cloud.points.push_back(p);
  }

  std::vector<Mask> masks;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    masks.push_back(Mask::from_bitmap(
      static_cast<int>(e), k.width(), k.height(),
      dilate(labels, static_cast<int>(e), k.width(), k.height(), spec.mask_dilation_px)));
  }

  if (spec.derive_attributes) {
    PreprocessConfig pre;
    pre.intensity_scale = 1.0;
    cloud = preprocess(cloud, pre);
  }

  return SyntheticScene{
    std::move(cloud), MaskSet(k.width(), k.height(), std::move(masks)), spec.ground_truth, k,
    std::move(labels)};
}

SceneFiles save_scene(
  const SyntheticScene & scene, const std::filesystem::path & dir, MaskFormat format)
{
  std::filesystem::create_directories(dir);
  SceneFiles files{dir / "cloud.pcd", dir / "masks.json", dir / "calib.json"};
  save_cloud_pcd(scene.cloud, files.cloud);
  if (format == MaskFormat::kManifest) {
    save_manifest(scene.masks, files.masks);
  } else {
    files.masks = dir / "masks";
    save_mask_images(scene.masks, files.masks);
  }
  save_transform_doc(TransformDoc{scene.ground_truth, scene.intrinsics}, files.calibration);
  return files;
}

}  // namespace segcalib
