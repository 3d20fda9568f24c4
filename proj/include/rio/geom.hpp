// Copyright 2026, The rio Authors
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

/**
 * \file geom.hpp
 * \brief Rotation, quaternion and rigid-pose algebra.
 *
 * Conventions: Hamilton quaternions, right-handed frames, world z-up. A
 * rotation q_b^w maps body-frame vectors into the world frame,
 * v^w = q_b^w * v^b. Gravity in the world frame is [0, 0, g]^T as it
 * appears in the IMU residual; the physical gravitational acceleration is
 * its negation.
 */
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <span>

namespace rio {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kDefaultGravity = 9.81;

enum class FrameTag { World, Body, Radar };

namespace geom {

/// Unit quaternion, Hamilton convention (w + xi + yj + zk).
class UnitQuaternion {
 public:
  UnitQuaternion() = default;
  /// Normalizes the input. A zero quaternion becomes identity.
  UnitQuaternion(double w, double x, double y, double z);

  static UnitQuaternion identity() { return {}; }
  static UnitQuaternion from_axis_angle(const Vec3 &axis, double angle);
  /// SO(3) exponential of a rotation vector.
  static UnitQuaternion exp(const Vec3 &rotvec);
  static UnitQuaternion from_matrix(const Mat3 &R);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  Vec3 vec() const { return {x_, y_, z_}; }
  double norm() const;

  UnitQuaternion inverse() const;
  /// Representative with w >= 0.
  UnitQuaternion canonical() const;
  Mat3 matrix() const;
  /// Rotation vector of the canonical representative (angle in [0, pi]).
  Vec3 log() const;

  /// Rotation angle in [0, pi].
  double angle() const { return log().norm(); }

 private:
  double w_ = 1.0, x_ = 0.0, y_ = 0.0, z_ = 0.0;
};

UnitQuaternion quat_multiply(const UnitQuaternion &a, const UnitQuaternion &b);
inline UnitQuaternion operator*(const UnitQuaternion &a,
                                const UnitQuaternion &b) {
  return quat_multiply(a, b);
}

Vec3 rotate_vector(const UnitQuaternion &q, const Vec3 &v);
inline Vec3 operator*(const UnitQuaternion &q, const Vec3 &v) {
  return rotate_vector(q, v);
}

/// Vector part of the canonical (w >= 0) representative.
Vec3 vec_part(const UnitQuaternion &q);

/// Geodesic angle between two rotations.
double angular_distance(const UnitQuaternion &a, const UnitQuaternion &b);

Mat3 skew(const Vec3 &v);
Mat3 so3_exp(const Vec3 &rotvec);
/// Right Jacobian of SO(3): Exp(phi + d) ~= Exp(phi) Exp(Jr(phi) d).
Mat3 right_jacobian(const Vec3 &phi);

/// Left and right quaternion product matrices acting on [w, x, y, z]:
/// a * b = left_matrix(a) b = right_matrix(b) a.
Eigen::Matrix4d left_matrix(const UnitQuaternion &q);
Eigen::Matrix4d right_matrix(const UnitQuaternion &q);

/// Rigid transform x -> R x + t.
struct Pose {
  UnitQuaternion rotation;
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Vec3 operator*(const Vec3 &x) const { return rotation * x + translation; }
  Pose operator*(const Pose &other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
  Pose inverse() const {
    const UnitQuaternion qi = rotation.inverse();
    return {qi, -(qi * translation)};
  }
};

/// Rigid transform T (no scale) minimizing sum |est_i - T ref_i|^2, so that
/// umeyama_align(T * X, X) == T. Throws DegenerateGeometry when fewer than
/// 3 points are given or the points are collinear/coincident.
Pose umeyama_align(std::span<const Vec3> est, std::span<const Vec3> ref);

/// Same minimizer without the degeneracy checks; identical sets give exactly
/// the identity. For collinear points the rotation about the common line is
/// arbitrary, which does not change the residuals. Needs at least one point.
Pose rigid_align(std::span<const Vec3> est, std::span<const Vec3> ref);

}  // namespace geom
}  // namespace rio
