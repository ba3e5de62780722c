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

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace segcalib
{
namespace
{

using Mat = std::array<std::array<double, 3>, 3>;

Mat mul(const Mat & a, const Mat & b)
{
  Mat c{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        c[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return c;
}

// Elemental rotations written out by hand, angles in degrees.
Mat rx(double deg)
{
  const double r = deg * 3.14159265358979323846 / 180.0;
  return {{{1, 0, 0}, {0, std::cos(r), -std::sin(r)}, {0, std::sin(r), std::cos(r)}}};
}
Mat ry(double deg)
{
  const double r = deg * 3.14159265358979323846 / 180.0;
  return {{{std::cos(r), 0, std::sin(r)}, {0, 1, 0}, {-std::sin(r), 0, std::cos(r)}}};
}
Mat rz(double deg)
{
  const double r = deg * 3.14159265358979323846 / 180.0;
  return {{{std::cos(r), -std::sin(r), 0}, {std::sin(r), std::cos(r), 0}, {0, 0, 1}}};
}

// Rotation angle through the eigenvector with eigenvalue 1: rotate a vector orthogonal to
// the axis and measure how far it turns.
double axis_angle_oracle_deg(const Eigen::Matrix3d & r)
{
  Eigen::EigenSolver<Eigen::Matrix3d> es(r);
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(es.eigenvalues()[i] - 1.0) < std::abs(es.eigenvalues()[best] - 1.0)) {
      best = i;
    }
  }
  const Eigen::Vector3d axis = es.eigenvectors().col(best).real().normalized();
  Eigen::Vector3d ortho = axis.cross(Eigen::Vector3d::UnitX());
  if (ortho.norm() < 0.5) {
    ortho = axis.cross(Eigen::Vector3d::UnitY());
  }
  ortho.normalize();
  const Eigen::Vector3d turned = r * ortho;
  return std::atan2(ortho.cross(turned).norm(), ortho.dot(turned)) * 180.0 / kPi;
}

Extrinsic random_extrinsic(std::mt19937_64 & rng)
{
  std::uniform_real_distribution<double> ang(-180.0, 180.0);
  std::uniform_real_distribution<double> lin(-2.0, 2.0);
  return Extrinsic(
    rotation_from_euler_deg(ang(rng), ang(rng) / 2.0, ang(rng)),
    Eigen::Vector3d(lin(rng), lin(rng), lin(rng)));
}

TEST(ComposeDelta, ZeroDeltaLeavesTransformUnchanged)
{
  const Extrinsic base(rotation_from_euler_deg(10, -20, 30), Eigen::Vector3d(1, 2, 3));
  const Extrinsic out = compose_delta(base, EulerDelta{});
  EXPECT_LE((out.rotation() - base.rotation()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((out.translation() - base.translation()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ComposeDelta, YawNinetyMapsXToY)
{
  const Extrinsic out = compose_delta(Extrinsic(), EulerDelta{0, 0, 90});
  const Eigen::Vector3d col = out.rotation().col(0);
  EXPECT_NEAR(col.x(), 0.0, 1e-9);
  EXPECT_NEAR(col.y(), 1.0, 1e-9);
  EXPECT_NEAR(col.z(), 0.0, 1e-9);
}

TEST(ComposeDelta, MatchesHandRolledElementalProduct)
{
  const Extrinsic out = compose_delta(Extrinsic(), EulerDelta{1, 2, 3});
  const Mat oracle = mul(mul(rz(3), ry(2)), rx(1));
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      EXPECT_NEAR(out.rotation()(i, j), oracle[i][j], 1e-12) << i << "," << j;
    }
  }
}

TEST(ComposeDelta, LeftMultipliesAndAddsTranslation)
{
  const Extrinsic base(rotation_from_euler_deg(5, 6, 7), Eigen::Vector3d(0.1, 0.2, 0.3));
  const Extrinsic out = compose_delta(base, EulerDelta{1, 2, 3, 0.5, -0.5, 0.25});
  const Eigen::Matrix3d expected = rotation_from_euler_deg(1, 2, 3) * base.rotation();
  EXPECT_LE((out.rotation() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((out.translation() - Eigen::Vector3d(0.6, -0.3, 0.55)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ComposeDelta, SingleAxisInverseRecoversRotation)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-30.0, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Extrinsic base = random_extrinsic(rng);
    EulerDelta d{};
    const double a = ang(rng);
    (trial % 3 == 0 ? d.d_roll : trial % 3 == 1 ? d.d_pitch : d.d_yaw) = a;
    const Extrinsic back = compose_delta(compose_delta(base, d), -d);
    EXPECT_LE((back.rotation() - base.rotation()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(RotationAngle, IdenticalIsZero)
{
  const Extrinsic t(rotation_from_euler_deg(3, 4, 5), Eigen::Vector3d::Zero());
  EXPECT_EQ(rotation_angle_between(t, t), 0.0);
}

TEST(RotationAngle, SingleAxisTenDegrees)
{
  const Extrinsic b(rotation_from_euler_deg(0, 0, 10), Eigen::Vector3d::Zero());
  EXPECT_NEAR(rotation_angle_between(Extrinsic(), b), 10.0, 1e-9);
}

TEST(RotationAngle, MatchesAxisAngleOracle)
{
  const Extrinsic roll = compose_delta(Extrinsic(), EulerDelta{3, 0, 0});
  const Extrinsic both = compose_delta(roll, EulerDelta{0, 4, 0});
  const double oracle = axis_angle_oracle_deg(both.rotation());
  EXPECT_NEAR(rotation_angle_between(Extrinsic(), both), oracle, 1e-9);
  EXPECT_GT(oracle, 4.0);
  EXPECT_LT(oracle, 7.0);
}

TEST(RotationAngle, SymmetricAndTriangleInequality)
{
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Extrinsic a = random_extrinsic(rng);
    const Extrinsic b = random_extrinsic(rng);
    const Extrinsic c = random_extrinsic(rng);
    const double ab = rotation_angle_between(a, b);
    EXPECT_NEAR(ab, rotation_angle_between(b, a), 1e-7);
    EXPECT_LE(ab, rotation_angle_between(a, c) + rotation_angle_between(c, b) + 1e-7);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 180.0);
  }
}

TEST(RotationAngle, AgreesWithOracleOnRandomPairs)
{
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Extrinsic a = random_extrinsic(rng);
    const Extrinsic b = random_extrinsic(rng);
    const double oracle = axis_angle_oracle_deg(a.rotation() * b.rotation().transpose());
    EXPECT_NEAR(rotation_angle_between(a, b), oracle, 1e-7);
  }
}

TEST(Extrinsic, RejectsNonOrthonormalRotation)
{
  Eigen::Matrix3d scaled = Eigen::Matrix3d::Identity() * 1.001;
  EXPECT_THROW(Extrinsic(scaled, Eigen::Vector3d::Zero()), std::invalid_argument);
  Eigen::Matrix3d reflection = Eigen::Matrix3d::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(Extrinsic(reflection, Eigen::Vector3d::Zero()), std::invalid_argument);
}

TEST(Extrinsic, MatrixRoundTripAndInverse)
{
  const Extrinsic t(rotation_from_euler_deg(10, 20, 30), Eigen::Vector3d(1, -2, 3));
  EXPECT_EQ(Extrinsic::from_matrix(t.matrix()), t);
  const Eigen::Vector3d p(0.3, 0.7, -1.1);
  EXPECT_LE((t.inverse().apply(t.apply(p)) - p).norm(), 1e-12);
  Eigen::Matrix4d bad = t.matrix();
  bad(3, 0) = 1.0;
  EXPECT_THROW(Extrinsic::from_matrix(bad), std::invalid_argument);
}

TEST(Intrinsics, Validation)
{
  EXPECT_NO_THROW(Intrinsics::from_focal(100, 100, 64, 48, 128, 96));
  EXPECT_THROW(Intrinsics::from_focal(0, 100, 64, 48, 128, 96), std::invalid_argument);
  EXPECT_THROW(Intrinsics::from_focal(100, -1, 64, 48, 128, 96), std::invalid_argument);
  EXPECT_THROW(Intrinsics::from_focal(100, 100, 128, 48, 128, 96), std::invalid_argument);
  EXPECT_THROW(Intrinsics::from_focal(100, 100, 64, 0, 128, 96), std::invalid_argument);
}

TEST(EulerDelta, FiniteCheck)
{
  EXPECT_TRUE((EulerDelta{1, 2, 3, 4, 5, 6}.is_finite()));
  EXPECT_FALSE((EulerDelta{0, 0, std::nan(""), 0, 0, 0}.is_finite()));
  EXPECT_FALSE((EulerDelta{0, 0, 0, 0, 0, INFINITY}.is_finite()));
}

}  // namespace
}  // namespace segcalib
