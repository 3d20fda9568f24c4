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


// Helpers shared by the unit tests and the acceptance runner.
#pragma once

#include <Eigen/Core>
#include <functional>
#include <random>

#include "rio/imu_preint.hpp"
#include "rio/types.hpp"

namespace rio::testing {

inline Vec3 random_vec(std::mt19937_64 &rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng), n(rng)};
}

/// Uniform on SO(3) (normalized 4D Gaussian).
inline UnitQuaternion random_rotation(std::mt19937_64 &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitQuaternion(n(rng), n(rng), n(rng), n(rng));
}

inline NavState random_state(std::mt19937_64 &rng) {
  NavState s;
  s.position = random_vec(rng, 5.0);
  s.velocity = random_vec(rng, 2.0);
  s.rotation = random_rotation(rng);
  s.bias.accel = random_vec(rng, 0.05);
  s.bias.gyro = random_vec(rng, 0.005);
  return s;
}

/// Central differences of f around x along each of the N coordinates of a
/// perturbation applied by `plus`.
template <int M, int N, typename X>
Eigen::Matrix<double, M, N> numeric_jacobian(
    const std::function<Eigen::Matrix<double, M, 1>(const X &)> &f, const X &x,
    const std::function<X(const X &, const Eigen::Matrix<double, N, 1> &)> &plus,
    double h = 1e-6) {
  Eigen::Matrix<double, M, N> J;
  for (int i = 0; i < N; ++i) {
    Eigen::Matrix<double, N, 1> d = Eigen::Matrix<double, N, 1>::Zero();
    d(i) = h;
    J.col(i) = (f(plus(x, d)) - f(plus(x, -d))) / (2.0 * h);
  }
  return J;
}

/// |A - B|_F / |B|_F, with an all-zero B compared absolutely.
inline double relative_error(const Eigen::MatrixXd &analytic, const Eigen::MatrixXd &numeric) {
  const double d = (analytic - numeric).norm();
  const double n = numeric.norm();
  return n > 0.0 ? d / n : d;
}

/// A random but smooth IMU stream of `count` samples at `rate`.
inline std::vector<ImuSample> random_imu(std::mt19937_64 &rng, int count, double rate) {
  const Vec3 w0 = random_vec(rng, 0.5), w1 = random_vec(rng, 0.5);
  const Vec3 a0 = random_vec(rng, 2.0) + Vec3(0, 0, 9.81), a1 = random_vec(rng, 2.0);
  std::vector<ImuSample> out;
  for (int i = 0; i < count; ++i) {
    const double t = i / rate;
    ImuSample s;
    s.timestamp = t;
    s.angular_velocity = w0 + std::sin(3.0 * t) * w1;
    s.linear_acceleration = a0 + std::cos(2.0 * t) * a1;
    out.push_back(s);
  }
  return out;
}

}  // namespace rio::testing
