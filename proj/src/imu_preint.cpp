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
 * \file imu_preint.cpp
 */
#include "rio/imu_preint.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "rio/errors.hpp"

namespace rio {

using geom::right_jacobian;
using geom::skew;

namespace {

constexpr int kA = 0, kB = 3, kT = 6, kBa = 9, kBg = 12;

using Mat15x18 = Eigen::Matrix<double, 15, 18>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

}  // namespace

PreintegratedImu preintegrate(std::span<const ImuSample> samples, const ImuBias &bias,
                              const ImuNoise &noise) {
  if (samples.size() < 2)
    throw Error(ErrorCode::EmptyStream, "pre-integration needs at least 2 IMU samples");
  if (!bias.accel.allFinite() || !bias.gyro.allFinite())
    throw Error(ErrorCode::InvalidArgument, "non-finite IMU bias");

  PreintegratedImu pre;
  pre.samples_.assign(samples.begin(), samples.end());
  pre.bias_ = bias;
  pre.noise_ = noise;

  const double sa2 = noise.accel_noise_density * noise.accel_noise_density;
  const double sg2 = noise.gyro_noise_density * noise.gyro_noise_density;
  const double sba2 = noise.accel_random_walk * noise.accel_random_walk;
  const double sbg2 = noise.gyro_random_walk * noise.gyro_random_walk;

  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const ImuSample &s0 = samples[i];
    const ImuSample &s1 = samples[i + 1];
    const double dt = s1.timestamp - s0.timestamp;
    if (!(dt > 0.0))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "IMU sample " + std::to_string(i + 1) + " at t=" +
                      std::to_string(s1.timestamp) + " does not follow t=" +
                      std::to_string(s0.timestamp));

    const Vec3 phi = (0.5 * (s0.angular_velocity + s1.angular_velocity) - bias.gyro) * dt;
    const UnitQuaternion dq = UnitQuaternion::exp(phi);
    const UnitQuaternion gamma1 = pre.gamma_ * dq;
    const Mat3 R0 = pre.gamma_.matrix();
    const Mat3 R1 = gamma1.matrix();
    const Mat3 Rphi = dq.matrix();
    const Mat3 Jr = right_jacobian(phi);
    const Vec3 a0 = s0.linear_acceleration - bias.accel;
    const Vec3 a1 = s1.linear_acceleration - bias.accel;
    const Vec3 acc = 0.5 * (R0 * a0 + R1 * a1);

    // Exact Jacobian of this step w.r.t. the error state.
    const Mat3 dacc_dtheta = -0.5 * (R0 * skew(a0) + R1 * skew(a1) * Rphi.transpose());
    const Mat3 dacc_dba = -0.5 * (R0 + R1);
    const Mat3 dacc_dbg = 0.5 * R1 * skew(a1) * Jr * dt;
    const double hdt2 = 0.5 * dt * dt;

    Mat15 F = Mat15::Identity();
    F.block<3, 3>(kA, kB) = Mat3::Identity() * dt;
    F.block<3, 3>(kA, kT) = hdt2 * dacc_dtheta;
    F.block<3, 3>(kA, kBa) = hdt2 * dacc_dba;
    F.block<3, 3>(kA, kBg) = hdt2 * dacc_dbg;
    F.block<3, 3>(kB, kT) = dt * dacc_dtheta;
    F.block<3, 3>(kB, kBa) = dt * dacc_dba;
    F.block<3, 3>(kB, kBg) = dt * dacc_dbg;
    F.block<3, 3>(kT, kT) = Rphi.transpose();
    F.block<3, 3>(kT, kBg) = -Jr * dt;

    // Noise order: [na0, ng0, na1, ng1, nba, nbg].
    Mat15x18 G = Mat15x18::Zero();
    const Mat3 dacc_dng = -0.25 * R1 * skew(a1) * Jr * dt;
    G.block<3, 3>(kA, 0) = hdt2 * 0.5 * R0;
    G.block<3, 3>(kA, 3) = hdt2 * dacc_dng;
    G.block<3, 3>(kA, 6) = hdt2 * 0.5 * R1;
    G.block<3, 3>(kA, 9) = hdt2 * dacc_dng;
    G.block<3, 3>(kB, 0) = dt * 0.5 * R0;
    G.block<3, 3>(kB, 3) = dt * dacc_dng;
    G.block<3, 3>(kB, 6) = dt * 0.5 * R1;
    G.block<3, 3>(kB, 9) = dt * dacc_dng;
    G.block<3, 3>(kT, 3) = 0.5 * dt * Jr;
    G.block<3, 3>(kT, 9) = 0.5 * dt * Jr;
    G.block<3, 3>(kBa, 12) = Mat3::Identity();
    G.block<3, 3>(kBg, 15) = Mat3::Identity();

    Eigen::Matrix<double, 18, 1> q;
    q << Vec3::Constant(sa2 / dt), Vec3::Constant(sg2 / dt), Vec3::Constant(sa2 / dt),
        Vec3::Constant(sg2 / dt), Vec3::Constant(sba2 * dt), Vec3::Constant(sbg2 * dt);

    pre.alpha_ += pre.beta_ * dt + hdt2 * acc;
    pre.beta_ += acc * dt;
    pre.gamma_ = gamma1;
    pre.dt_ += dt;
    pre.jacobian_ = F * pre.jacobian_;
    pre.covariance_ = F * pre.covariance_ * F.transpose() + G * q.asDiagonal() * G.transpose();
  }

  pre.covariance_ = 0.5 * (pre.covariance_ + pre.covariance_.transpose());
  const Eigen::LLT<Mat15> llt(pre.covariance_);
  if (llt.info() == Eigen::Success) {
    const Mat15 L = llt.matrixL();
    pre.sqrt_info_ = L.triangularView<Eigen::Lower>().solve(Mat15::Identity());
  } else {
    // Singular covariance (zero noise configured): fall back to unit weights.
    pre.sqrt_info_ = Mat15::Identity();
  }
  return pre;
}

Vec3 PreintegratedImu::corrected_alpha(const ImuBias &b) const {
  return alpha_ + jacobian_.block<3, 3>(kA, kBa) * (b.accel - bias_.accel) +
         jacobian_.block<3, 3>(kA, kBg) * (b.gyro - bias_.gyro);
}

Vec3 PreintegratedImu::corrected_beta(const ImuBias &b) const {
  return beta_ + jacobian_.block<3, 3>(kB, kBa) * (b.accel - bias_.accel) +
         jacobian_.block<3, 3>(kB, kBg) * (b.gyro - bias_.gyro);
}

UnitQuaternion PreintegratedImu::corrected_gamma(const ImuBias &b) const {
  return gamma_ * UnitQuaternion::exp(jacobian_.block<3, 3>(kT, kBg) * (b.gyro - bias_.gyro));
}

double PreintegratedImu::bias_deviation(const ImuBias &b) const {
  return std::max((b.accel - bias_.accel).cwiseAbs().maxCoeff(),
                  (b.gyro - bias_.gyro).cwiseAbs().maxCoeff());
}

PreintegratedImu PreintegratedImu::relinearized(const ImuBias &b) const {
  return preintegrate(samples_, b, noise_);
}

std::vector<ImuSample> slice_imu(std::span<const ImuSample> stream, double t0, double t1) {
  std::vector<ImuSample> out;
  if (stream.empty() || !(t1 > t0)) return out;
  if (stream.front().timestamp > t0 || stream.back().timestamp < t1) return out;

  auto interpolate = [&](double t) {
    const auto it = std::lower_bound(stream.begin(), stream.end(), t,
                                     [](const ImuSample &s, double v) { return s.timestamp < v; });
    if (it->timestamp == t) return *it;
    const ImuSample &b = *it;
    const ImuSample &a = *(it - 1);
    const double u = (t - a.timestamp) / (b.timestamp - a.timestamp);
    ImuSample s;
    s.timestamp = t;
    s.angular_velocity = (1.0 - u) * a.angular_velocity + u * b.angular_velocity;
    s.linear_acceleration = (1.0 - u) * a.linear_acceleration + u * b.linear_acceleration;
    return s;
  };

  out.push_back(interpolate(t0));
  for (const auto &s : stream) {
    if (s.timestamp > t0 && s.timestamp < t1) out.push_back(s);
  }
  out.push_back(interpolate(t1));
  return out;
}

Vec15 imu_residual(const PreintegratedImu &pre, const NavState &sk, const NavState &sk1,
                   const Vec3 &gravity) {
  const double dt = pre.dt();
  const Mat3 RkT = sk.rotation.matrix().transpose();
  Vec15 r;
  r.segment<3>(kA) = RkT * (sk1.position - sk.position + 0.5 * gravity * dt * dt -
                            sk.velocity * dt) -
                     pre.corrected_alpha(sk.bias);
  r.segment<3>(kB) = RkT * (sk1.velocity + gravity * dt - sk.velocity) -
                     pre.corrected_beta(sk.bias);
  const UnitQuaternion err =
      sk.rotation.inverse() * sk1.rotation * pre.corrected_gamma(sk.bias).inverse();
  r.segment<3>(kT) = 2.0 * geom::vec_part(err);
  r.segment<3>(kBa) = sk1.bias.accel - sk.bias.accel;
  r.segment<3>(kBg) = sk1.bias.gyro - sk.bias.gyro;
  return r;
}

ImuJacobians imu_residual_jacobians(const PreintegratedImu &pre, const NavState &sk,
                                    const NavState &sk1, const Vec3 &gravity) {
  const double dt = pre.dt();
  const Mat3 RkT = sk.rotation.matrix().transpose();
  const Mat15x6 Jb = pre.bias_jacobians();
  const Vec3 dbg = sk.bias.gyro - pre.linearization_bias().gyro;
  const Mat3 J_theta_bg = Jb.block<3, 3>(kT, 3);
  const UnitQuaternion gamma_c = pre.corrected_gamma(sk.bias);
  const UnitQuaternion err =
      (sk.rotation.inverse() * sk1.rotation * gamma_c.inverse()).canonical();
  const Mat3 Ev = skew(err.vec());
  const Mat3 left = err.w() * Mat3::Identity() + Ev;
  const Mat3 right = err.w() * Mat3::Identity() - Ev;
  const Mat3 Rg = gamma_c.matrix();

  const Vec3 dp = sk1.position - sk.position + 0.5 * gravity * dt * dt - sk.velocity * dt;
  const Vec3 dv = sk1.velocity + gravity * dt - sk.velocity;

  ImuJacobians J;
  J.d_state_k.setZero();
  J.d_state_k1.setZero();

  Mat15 &A = J.d_state_k;
  A.block<3, 3>(kA, 0) = -RkT;
  A.block<3, 3>(kA, 3) = -RkT * dt;
  A.block<3, 3>(kA, 6) = skew(RkT * dp);
  A.block<3, 3>(kA, 9) = -Jb.block<3, 3>(kA, 0);
  A.block<3, 3>(kA, 12) = -Jb.block<3, 3>(kA, 3);
  A.block<3, 3>(kB, 3) = -RkT;
  A.block<3, 3>(kB, 6) = skew(RkT * dv);
  A.block<3, 3>(kB, 9) = -Jb.block<3, 3>(kB, 0);
  A.block<3, 3>(kB, 12) = -Jb.block<3, 3>(kB, 3);
  A.block<3, 3>(kT, 6) = -right;
  A.block<3, 3>(kT, 12) = -left * Rg * right_jacobian(J_theta_bg * dbg) * J_theta_bg;
  A.block<3, 3>(kBa, 9) = -Mat3::Identity();
  A.block<3, 3>(kBg, 12) = -Mat3::Identity();

  Mat15 &B = J.d_state_k1;
  B.block<3, 3>(kA, 0) = RkT;
  B.block<3, 3>(kB, 3) = RkT;
  B.block<3, 3>(kT, 6) = left * Rg;
  B.block<3, 3>(kBa, 9) = Mat3::Identity();
  B.block<3, 3>(kBg, 12) = Mat3::Identity();
  return J;
}

NavState propagate(const NavState &s, const PreintegratedImu &pre, const Vec3 &gravity) {
  const double dt = pre.dt();
  NavState out = s;
  out.timestamp = s.timestamp + dt;
  out.position = s.position + s.velocity * dt - 0.5 * gravity * dt * dt +
                 s.rotation * pre.corrected_alpha(s.bias);
  out.velocity = s.velocity - gravity * dt + s.rotation * pre.corrected_beta(s.bias);
  out.rotation = s.rotation * pre.corrected_gamma(s.bias);
  return out;
}

NavState retract(const NavState &s, const Vec15 &d) {
  NavState out = s;
  out.position += d.segment<3>(0);
  out.velocity += d.segment<3>(3);
  out.rotation = s.rotation * UnitQuaternion::exp(d.segment<3>(6));
  out.bias.accel += d.segment<3>(9);
  out.bias.gyro += d.segment<3>(12);
  return out;
}

}  // namespace rio
