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

#include <Eigen/Core>

#include <string>
#include <vector>

namespace segcalib
{

/// One attributed LiDAR return: position, unit normal, normalized reflectivity, class label.
///
/// Before preprocessing `reflectivity` holds the raw sensor intensity and the normal is zero.
/// A zero normal marks an invalid (degenerate) normal; label -1 means noise / unlabeled.
struct Point
{
  Eigen::Vector3d position{Eigen::Vector3d::Zero()};
  Eigen::Vector3d normal{Eigen::Vector3d::Zero()};
  double reflectivity{0.0};
  int label{-1};

  bool has_valid_normal() const { return normal.squaredNorm() > 0.25; }
};

struct PointCloud
{
  std::vector<Point> points;
  std::string source_path;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Rigid transform from the LiDAR frame into the camera frame.
class Extrinsic
{
public:
  /// Identity transform.
  Extrinsic();
  /// Throws std::invalid_argument unless `rotation` is orthonormal with det +1 (to 1e-9).
  Extrinsic(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation);

  static Extrinsic from_matrix(const Eigen::Matrix4d & transform);

  const Eigen::Matrix3d & rotation() const { return rotation_; }
  const Eigen::Vector3d & translation() const { return translation_; }
  Eigen::Matrix4d matrix() const;

  Eigen::Vector3d apply(const Eigen::Vector3d & lidar_point) const
  {
    return rotation_ * lidar_point + translation_;
  }

  Extrinsic inverse() const;

  bool operator==(const Extrinsic & other) const
  {
    return rotation_ == other.rotation_ && translation_ == other.translation_;
  }

private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Pinhole camera matrix plus image size.
class Intrinsics
{
public:
  /// Throws std::invalid_argument unless fx, fy > 0 and the principal point lies inside the image.
  Intrinsics(const Eigen::Matrix3d & k, int width, int height);
  static Intrinsics from_focal(double fx, double fy, double cx, double cy, int width, int height);

  const Eigen::Matrix3d & k() const { return k_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double fx() const { return k_(0, 0); }
  double fy() const { return k_(1, 1); }
  double cx() const { return k_(0, 2); }
  double cy() const { return k_(1, 2); }

private:
  Eigen::Matrix3d k_;
  int width_;
  int height_;
};

struct PixelCoord
{
  double u{0.0};
  double v{0.0};
  double depth{0.0};
};

/// Increment applied on top of an extrinsic. Angles in degrees, translation in meters.
struct EulerDelta
{
  double d_roll{0.0};
  double d_pitch{0.0};
  double d_yaw{0.0};
  double d_tx{0.0};
  double d_ty{0.0};
  double d_tz{0.0};

  bool is_finite() const;
  EulerDelta operator-() const { return {-d_roll, -d_pitch, -d_yaw, -d_tx, -d_ty, -d_tz}; }
};

constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Intrinsic Z-Y-X rotation: Rz(yaw) * Ry(pitch) * Rx(roll), angles in degrees.
Eigen::Matrix3d rotation_from_euler_deg(double roll, double pitch, double yaw);

/// Rotation of `angle_deg` degrees about `axis` (normalized internally).
Eigen::Matrix3d rotation_from_axis_angle_deg(const Eigen::Vector3d & axis, double angle_deg);

/// Left-multiplies the delta rotation (camera frame) and adds the translation delta.
Extrinsic compose_delta(const Extrinsic & base, const EulerDelta & delta);

/// Left-multiplies an arbitrary rotation and adds a translation offset.
Extrinsic perturb(
  const Extrinsic & base, const Eigen::Matrix3d & rotation_delta,
  const Eigen::Vector3d & translation_delta);

/// Geodesic angle between the two rotations, degrees in [0, 180].
double rotation_angle_between(const Extrinsic & a, const Extrinsic & b);

}  // namespace segcalib
