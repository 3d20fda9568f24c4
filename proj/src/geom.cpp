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
 * \file geom.cpp
 */
#include "rio/geom.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "rio/errors.hpp"

namespace rio {

const char *to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::EmptyStream: return "EmptyStream";
    case ErrorCode::NonMonotonicTimestamps: return "NonMonotonicTimestamps";
    case ErrorCode::EmptyScan: return "EmptyScan";
    case ErrorCode::ZeroRangePoint: return "ZeroRangePoint";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::BinConfigMismatch: return "BinConfigMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::NoAssociations: return "NoAssociations";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
  }
  return "Unknown";
}

namespace geom {

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n == 0.0 || !std::isfinite(n)) return;
  // Already unit up to rounding: keep the bits so text round trips are exact.
  if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    w_ = w;
    x_ = x;
    y_ = y;
    z_ = z;
    return;
  }
  w_ = w / n;
  x_ = x / n;
  y_ = y / n;
  z_ = z / n;
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3 &axis, double angle) {
  const double n = axis.norm();
  if (n == 0.0) return {};
  return exp(axis / n * angle);
}

UnitQuaternion UnitQuaternion::exp(const Vec3 &rotvec) {
  const double theta = rotvec.norm();
  const double half = 0.5 * theta;
  // sin(x/2)/x, series near zero
  const double k = theta < 1e-8 ? 0.5 - theta * theta / 48.0
                                : std::sin(half) / theta;
  return {std::cos(half), k * rotvec.x(), k * rotvec.y(), k * rotvec.z()};
}

UnitQuaternion UnitQuaternion::from_matrix(const Mat3 &R) {
  const Eigen::Quaterniond q(R);
  return {q.w(), q.x(), q.y(), q.z()};
}

double UnitQuaternion::norm() const {
  return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
}

UnitQuaternion UnitQuaternion::inverse() const { return {w_, -x_, -y_, -z_}; }

UnitQuaternion UnitQuaternion::canonical() const {
  if (w_ >= 0.0) return *this;
  UnitQuaternion q;
  q.w_ = -w_;
  q.x_ = -x_;
  q.y_ = -y_;
  q.z_ = -z_;
  return q;
}

Mat3 UnitQuaternion::matrix() const {
  const double ww = w_ * w_, xx = x_ * x_, yy = y_ * y_, zz = z_ * z_;
  const double xy = x_ * y_, xz = x_ * z_, yz = y_ * z_;
  const double wx = w_ * x_, wy = w_ * y_, wz = w_ * z_;
  Mat3 R;
  R << ww + xx - yy - zz, 2 * (xy - wz), 2 * (xz + wy),
      2 * (xy + wz), ww - xx + yy - zz, 2 * (yz - wx),
      2 * (xz - wy), 2 * (yz + wx), ww - xx - yy + zz;
  return R;
}

Vec3 UnitQuaternion::log() const {
  const UnitQuaternion c = canonical();
  const Vec3 v = c.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v;  // 2 asin(s)/s -> 2
  const double theta = 2.0 * std::atan2(s, c.w());
  return v * (theta / s);
}

UnitQuaternion quat_multiply(const UnitQuaternion &a, const UnitQuaternion &b) {
  return {a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
          a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
          a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
          a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w()};
}

Vec3 rotate_vector(const UnitQuaternion &q, const Vec3 &v) {
  // v' = v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u = q.vec();
  const Vec3 t = 2.0 * u.cross(v);
  return v + q.w() * t + u.cross(t);
}

Vec3 vec_part(const UnitQuaternion &q) { return q.canonical().vec(); }

double angular_distance(const UnitQuaternion &a, const UnitQuaternion &b) {
  return (a.inverse() * b).angle();
}

Mat3 skew(const Vec3 &v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(),
      v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return S;
}

Mat3 so3_exp(const Vec3 &rotvec) { return UnitQuaternion::exp(rotvec).matrix(); }

Mat3 right_jacobian(const Vec3 &phi) {
  const double theta = phi.norm();
  const Mat3 K = skew(phi);
  if (theta < 1e-5) {
    return Mat3::Identity() - 0.5 * K + K * K / 6.0;
  }
  const double t2 = theta * theta;
  return Mat3::Identity() - (1.0 - std::cos(theta)) / t2 * K +
         (theta - std::sin(theta)) / (t2 * theta) * K * K;
}

Eigen::Matrix4d left_matrix(const UnitQuaternion &q) {
  Eigen::Matrix4d L;
  L << q.w(), -q.x(), -q.y(), -q.z(),
      q.x(), q.w(), -q.z(), q.y(),
      q.y(), q.z(), q.w(), -q.x(),
      q.z(), -q.y(), q.x(), q.w();
  return L;
}

Eigen::Matrix4d right_matrix(const UnitQuaternion &q) {
  Eigen::Matrix4d R;
  R << q.w(), -q.x(), -q.y(), -q.z(),
      q.x(), q.w(), q.z(), -q.y(),
      q.y(), -q.z(), q.w(), q.x(),
      q.z(), q.y(), -q.x(), q.w();
  return R;
}

namespace {

bool is_degenerate(std::span<const Vec3> pts, const Vec3 &mean) {
  Mat3 scatter = Mat3::Zero();
  for (const auto &p : pts) scatter += (p - mean) * (p - mean).transpose();
  const Eigen::SelfAdjointEigenSolver<Mat3> es(scatter);
  const Vec3 ev = es.eigenvalues();  // ascending
  return ev(2) <= 1e-18 || ev(1) <= 1e-12 * ev(2);
}

Vec3 centroid(std::span<const Vec3> pts) {
  Vec3 mu = Vec3::Zero();
  for (const auto &p : pts) mu += p;
  return mu / static_cast<double>(pts.size());
}

Pose align_about(std::span<const Vec3> est, std::span<const Vec3> ref, const Vec3 &mu_e,
                 const Vec3 &mu_r) {
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < est.size(); ++i)
    cov += (est[i] - mu_e) * (ref[i] - mu_r).transpose();

  const Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 S = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) S(2, 2) = -1.0;
  const Mat3 R = svd.matrixU() * S * svd.matrixV().transpose();

  Pose T;
  T.rotation = UnitQuaternion::from_matrix(R);
  T.translation = mu_e - T.rotation * mu_r;
  return T;
}

}  // namespace

Pose umeyama_align(std::span<const Vec3> est, std::span<const Vec3> ref) {
  if (est.size() != ref.size())
    throw Error(ErrorCode::InvalidArgument, "umeyama_align: size mismatch");
  if (est.size() < 3)
    throw Error(ErrorCode::DegenerateGeometry, "umeyama_align: need >= 3 points");
  const Vec3 mu_e = centroid(est), mu_r = centroid(ref);
  if (is_degenerate(ref, mu_r) || is_degenerate(est, mu_e))
    throw Error(ErrorCode::DegenerateGeometry,
                "umeyama_align: collinear or coincident points");
  return align_about(est, ref, mu_e, mu_r);
}

Pose rigid_align(std::span<const Vec3> est, std::span<const Vec3> ref) {
  if (est.size() != ref.size())
    throw Error(ErrorCode::InvalidArgument, "rigid_align: size mismatch");
  if (est.empty()) throw Error(ErrorCode::InvalidArgument, "rigid_align: no points");
  // Identical sets: the SVD would only add round-off to the exact answer.
  if (std::equal(est.begin(), est.end(), ref.begin())) return Pose::identity();
  return align_about(est, ref, centroid(est), centroid(ref));
}

}  // namespace geom
}  // namespace rio
