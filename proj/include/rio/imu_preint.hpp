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
 * \file imu_preint.hpp
 * \brief IMU pre-integration between radar frames and the 15-dim IMU residual.
 *
 * The pre-integrated terms (alpha, beta, gamma) live in the body frame at the
 * start of the interval and exclude gravity; gravity enters in the residual.
 * Error-state ordering everywhere is [dp, dv, dtheta, dba, dbg] for states and
 * [dalpha, dbeta, dtheta, dba, dbg] for the residual. Rotations are perturbed
 * on the right: q <- q * Exp(dtheta).
 */
#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "rio/types.hpp"

namespace rio {

using Vec15 = Eigen::Matrix<double, 15, 1>;
using Mat15 = Eigen::Matrix<double, 15, 15>;
using Mat15x6 = Eigen::Matrix<double, 15, 6>;

/// Continuous-time noise densities.
struct ImuNoise {
  double accel_noise_density = 0.01;   // m/s^2/sqrt(Hz)
  double gyro_noise_density = 1e-3;    // rad/s/sqrt(Hz)
  double accel_random_walk = 1e-3;     // m/s^3/sqrt(Hz)
  double gyro_random_walk = 1e-4;      // rad/s^2/sqrt(Hz)
};

class PreintegratedImu {
 public:
  const Vec3 &alpha() const { return alpha_; }
  const Vec3 &beta() const { return beta_; }
  const UnitQuaternion &gamma() const { return gamma_; }
  double dt() const { return dt_; }
  double start_time() const { return samples_.front().timestamp; }
  double end_time() const { return samples_.back().timestamp; }
  const ImuBias &linearization_bias() const { return bias_; }
  /// d[alpha, beta, theta, ba, bg] / d[ba, bg].
  Mat15x6 bias_jacobians() const { return jacobian_.rightCols<6>(); }
  const Mat15 &covariance() const { return covariance_; }
  /// Lower-triangular S = L^-1 (covariance = L L^T), so S^T S = covariance^-1.
  const Mat15 &sqrt_information() const { return sqrt_info_; }
  const std::vector<ImuSample> &samples() const { return samples_; }
  const ImuNoise &noise() const { return noise_; }

  /// First-order bias-corrected pseudo-measurements.
  Vec3 corrected_alpha(const ImuBias &b) const;
  Vec3 corrected_beta(const ImuBias &b) const;
  UnitQuaternion corrected_gamma(const ImuBias &b) const;

  /// Largest component-wise deviation of `b` from the linearization bias.
  double bias_deviation(const ImuBias &b) const;

  /// Re-integrates the stored samples around a new linearization bias.
  PreintegratedImu relinearized(const ImuBias &b) const;

 private:
  friend PreintegratedImu preintegrate(std::span<const ImuSample>, const ImuBias &,
                                       const ImuNoise &);
  std::vector<ImuSample> samples_;
  ImuBias bias_;
  ImuNoise noise_;
  Vec3 alpha_ = Vec3::Zero();
  Vec3 beta_ = Vec3::Zero();
  UnitQuaternion gamma_;
  double dt_ = 0.0;
  Mat15 jacobian_ = Mat15::Identity();
  Mat15 covariance_ = Mat15::Zero();
  Mat15 sqrt_info_ = Mat15::Identity();
};

/// Midpoint integration of `samples` (first to last timestamp) around `bias`.
/// Throws EmptyStream for fewer than 2 samples and NonMonotonicTimestamps
/// when timestamps do not strictly increase.
PreintegratedImu preintegrate(std::span<const ImuSample> samples, const ImuBias &bias,
                              const ImuNoise &noise = {});

/// Samples covering [t0, t1], with linearly interpolated samples inserted at
/// both ends when no sample falls exactly on them.
std::vector<ImuSample> slice_imu(std::span<const ImuSample> stream, double t0, double t1);

/// Raw (unwhitened) residual [dalpha, dbeta, dtheta, dba, dbg].
Vec15 imu_residual(const PreintegratedImu &pre, const NavState &state_k,
                   const NavState &state_k1, const Vec3 &gravity);

struct ImuJacobians {
  Mat15 d_state_k;   // w.r.t. [dp, dv, dtheta, dba, dbg] of state k
  Mat15 d_state_k1;  // same for state k+1
};

/// Analytic Jacobians of the raw residual.
ImuJacobians imu_residual_jacobians(const PreintegratedImu &pre, const NavState &state_k,
                                    const NavState &state_k1, const Vec3 &gravity);

/// Propagates a state through the pre-integrated interval (bias of `state`).
NavState propagate(const NavState &state, const PreintegratedImu &pre, const Vec3 &gravity);

/// Applies an error-state increment [dp, dv, dtheta, dba, dbg].
NavState retract(const NavState &state, const Vec15 &delta);

}  // namespace rio
