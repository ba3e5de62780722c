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

#include "segcalib/types.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segcalib
{

namespace
{

constexpr double kOrthoTol = 1e-9;

void check_rotation(const Eigen::Matrix3d & r)
{
  if (!r.allFinite()) {
    throw std::invalid_argument("rotation has non-finite entries");
  }
  const double ortho_err = (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kOrthoTol) {
    throw std::invalid_argument("rotation is not orthonormal");
  }
  if (std::abs(r.determinant() - 1.0) > kOrthoTol) {
    throw std::invalid_argument("rotation determinant is not +1");
  }
}

}  // namespace

Extrinsic::Extrinsic()
: rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero())
{
}

Extrinsic::Extrinsic(const Eigen::Matrix3d & rotation, const Eigen::Vector3d & translation)
: rotation_(rotation), translation_(translation)
{
  check_rotation(rotation_);
  if (!translation_.allFinite()) {
    throw std::invalid_argument("translation has non-finite entries");
  }
}

Extrinsic Extrinsic::from_matrix(const Eigen::Matrix4d & transform)
{
  const Eigen::RowVector4d last = transform.row(3);
  if (last != Eigen::RowVector4d(0, 0, 0, 1)) {
    throw std::invalid_argument("bottom row of a rigid transform must be 0 0 0 1");
  }
  return Extrinsic(transform.topLeftCorner<3, 3>(), transform.topRightCorner<3, 1>());
}

Eigen::Matrix4d Extrinsic::matrix() const
{
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Extrinsic Extrinsic::inverse() const
{
  const Eigen::Matrix3d rt = rotation_.transpose();
  return Extrinsic(rt, -(rt * translation_));
}

Intrinsics::Intrinsics(const Eigen::Matrix3d & k, int width, int height)
: k_(k), width_(width), height_(height)
{
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("image size must be positive");
  }
  if (!k.allFinite() || !(k(0, 0) > 0.0) || !(k(1, 1) > 0.0)) {
    throw std::invalid_argument("focal lengths must be positive");
  }
  if (!(k(0, 2) > 0.0 && k(0, 2) < width && k(1, 2) > 0.0 && k(1, 2) < height)) {
    throw std::invalid_argument("principal point must lie inside the image");
  }
  if (k(1, 0) != 0.0 || k(2, 0) != 0.0 || k(2, 1) != 0.0 || k(2, 2) != 1.0) {
    throw std::invalid_argument("K must be upper triangular with K(2,2) = 1");
  }
}

Intrinsics Intrinsics::from_focal(double fx, double fy, double cx, double cy, int width, int height)
{
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return Intrinsics(k, width, height);
}

bool EulerDelta::is_finite() const
{
  return std::isfinite(d_roll) && std::isfinite(d_pitch) && std::isfinite(d_yaw) &&
         std::isfinite(d_tx) && std::isfinite(d_ty) && std::isfinite(d_tz);
}

Eigen::Matrix3d rotation_from_euler_deg(double roll, double pitch, double yaw)
{
  const Eigen::AngleAxisd rz(deg2rad(yaw), Eigen::Vector3d::UnitZ());
  const Eigen::AngleAxisd ry(deg2rad(pitch), Eigen::Vector3d::UnitY());
  const Eigen::AngleAxisd rx(deg2rad(roll), Eigen::Vector3d::UnitX());
  return (rz * ry * rx).toRotationMatrix();
}

Eigen::Matrix3d rotation_from_axis_angle_deg(const Eigen::Vector3d & axis, double angle_deg)
{
  return Eigen::AngleAxisd(deg2rad(angle_deg), axis.normalized()).toRotationMatrix();
}

Extrinsic compose_delta(const Extrinsic & base, const EulerDelta & delta)
{
  const Eigen::Matrix3d r_delta = rotation_from_euler_deg(delta.d_roll, delta.d_pitch, delta.d_yaw);
  return Extrinsic(
    r_delta * base.rotation(),
    base.translation() + Eigen::Vector3d(delta.d_tx, delta.d_ty, delta.d_tz));
}

Extrinsic perturb(
  const Extrinsic & base, const Eigen::Matrix3d & rotation_delta,
  const Eigen::Vector3d & translation_delta)
{
  return Extrinsic(rotation_delta * base.rotation(), base.translation() + translation_delta);
}

double rotation_angle_between(const Extrinsic & a, const Extrinsic & b)
{
  const Eigen::Matrix3d rel = a.rotation() * b.rotation().transpose();
  const Eigen::Vector3d skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double sin_theta = 0.5 * skew.norm();
  const double cos_theta = std::clamp(0.5 * (rel.trace() - 1.0), -1.0, 1.0);
  return rad2deg(std::atan2(sin_theta, cos_theta));
}

}  // namespace segcalib
