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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rio/errors.hpp"
#include "rio/imu_preint.hpp"
#include "rio/sim.hpp"
#include "support.hpp"

namespace rio {
namespace {

using testing::random_imu;
using testing::random_rotation;
using testing::random_state;
using testing::random_vec;
using testing::relative_error;

const Vec3 kGravity(0.0, 0.0, kDefaultGravity);

std::vector<ImuSample> constant_stream(const Vec3 &gyro, const Vec3 &acc, double duration,
                                       double rate = 200.0) {
  std::vector<ImuSample> out;
  const int n = static_cast<int>(std::lround(duration * rate));
  for (int i = 0; i <= n; ++i) out.push_back({i / rate, gyro, acc});
  return out;
}

TEST(Preintegrate, StationaryLevel) {
  const auto samples = constant_stream(Vec3::Zero(), kGravity, 1.0);
  const PreintegratedImu pre = preintegrate(samples, ImuBias{});
  EXPECT_NEAR(pre.dt(), 1.0, 1e-12);
  EXPECT_LT((pre.alpha() - Vec3(0, 0, 4.905)).norm(), 1e-9);
  EXPECT_LT((pre.beta() - Vec3(0, 0, 9.81)).norm(), 1e-9);
  EXPECT_LT(pre.gamma().angle(), 1e-12);

  NavState s;
  s.position = Vec3(1, 2, 3);
  NavState s1 = s;
  s1.timestamp = 1.0;
  EXPECT_LT(imu_residual(pre, s, s1, kGravity).norm(), 1e-9);
}

TEST(Preintegrate, PureYawRotation) {
  const auto samples = constant_stream(Vec3(0, 0, M_PI / 2), kGravity, 1.0);
  const PreintegratedImu pre = preintegrate(samples, ImuBias{});
  const UnitQuaternion expected = UnitQuaternion::from_axis_angle(Vec3::UnitZ(), M_PI / 2);
  EXPECT_LT(geom::angular_distance(pre.gamma(), expected), 1e-6);
}

TEST(Preintegrate, RejectsBadStreams) {
  const auto one = constant_stream(Vec3::Zero(), kGravity, 0.0);
  ASSERT_EQ(one.size(), 1u);
  try {
    preintegrate(one, ImuBias{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyStream);
  }
  auto samples = constant_stream(Vec3::Zero(), kGravity, 0.1);
  std::swap(samples[3], samples[4]);
  try {
    preintegrate(samples, ImuBias{});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonicTimestamps);
  }
}

// Ground truth from the simulator between consecutive radar frames.
TEST(Preintegrate, SimulatedTrajectoryGivesZeroResidual) {
  sim::CircleTrajectory::Params p;
  p.vertical_amplitude = 0.2;
  p.vertical_frequency = 0.5;
  p.roll_amplitude = 0.03;
  p.pitch_amplitude = 0.03;
  p.attitude_frequency = 0.7;
  const sim::CircleTrajectory traj(p);
  const auto imu = sim::gen_imu(traj, 0.0, 2.0, sim::ImuSimConfig{}, 1);
  for (int k = 0; k < 20; ++k) {
    const double t0 = k * 0.1, t1 = (k + 1) * 0.1;
    const auto slice = slice_imu(imu, t0, t1);
    const PreintegratedImu pre = preintegrate(slice, ImuBias{});
    const Vec15 r = imu_residual(pre, traj.sample(t0).state(), traj.sample(t1).state(), kGravity);
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-6) << "interval " << k;
  }
}

TEST(ImuResidual, EqualBiasesGiveZeroBiasRows) {
  std::mt19937_64 rng(21);
  const PreintegratedImu pre = preintegrate(random_imu(rng, 21, 200.0), ImuBias{});
  NavState a = random_state(rng), b = random_state(rng);
  b.bias = a.bias;
  const Vec15 r = imu_residual(pre, a, b, kGravity);
  EXPECT_TRUE(r.segment<6>(9).isZero(0.0));
}

TEST(ImuResidual, PositionPerturbationMapsThroughRotation) {
  std::mt19937_64 rng(22);
  const PreintegratedImu pre = preintegrate(random_imu(rng, 21, 200.0), ImuBias{});
  const NavState a = random_state(rng), b = random_state(rng);
  const double eps = 0.25;
  NavState b2 = b;
  b2.position += Vec3(eps, 0, 0);
  const Vec15 d = imu_residual(pre, a, b2, kGravity) - imu_residual(pre, a, b, kGravity);
  const Vec3 expected = a.rotation.inverse() * Vec3(eps, 0, 0);
  EXPECT_LT((d.head<3>() - expected).norm(), 1e-12);
  EXPECT_LT(d.tail<12>().norm(), 1e-12);
}

// Finite differences of the raw residual over the retraction of both states.
double imu_jacobian_error(std::mt19937_64 &rng) {
  ImuBias lin;
  lin.accel = random_vec(rng, 0.05);
  lin.gyro = random_vec(rng, 0.005);
  const PreintegratedImu pre = preintegrate(random_imu(rng, 21, 200.0), lin);
  NavState a = random_state(rng), b = random_state(rng);
  a.bias.accel = lin.accel + random_vec(rng, 5e-3);
  a.bias.gyro = lin.gyro + random_vec(rng, 5e-4);
  const ImuJacobians J = imu_residual_jacobians(pre, a, b, kGravity);

  Eigen::Matrix<double, 15, 30> analytic, numeric;
  analytic << J.d_state_k, J.d_state_k1;
  const double h = 1e-6;
  for (int i = 0; i < 30; ++i) {
    Vec15 d = Vec15::Zero();
    d(i % 15) = h;
    const bool first = i < 15;
    const Vec15 rp = imu_residual(pre, first ? retract(a, d) : a, first ? b : retract(b, d), kGravity);
    const Vec15 rm =
        imu_residual(pre, first ? retract(a, -d) : a, first ? b : retract(b, -d), kGravity);
    numeric.col(i) = (rp - rm) / (2.0 * h);
  }
  return relative_error(analytic, numeric);
}

TEST(ImuJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) EXPECT_LT(imu_jacobian_error(rng), 1e-5) << "instance " << i;
}

TEST(ImuJacobians, BiasRowsAreMinusIdentity) {
  std::mt19937_64 rng(24);
  const PreintegratedImu pre = preintegrate(random_imu(rng, 21, 200.0), ImuBias{});
  const ImuJacobians J = imu_residual_jacobians(pre, random_state(rng), random_state(rng), kGravity);
  EXPECT_TRUE((J.d_state_k.block<6, 6>(9, 9) == -Eigen::Matrix<double, 6, 6>::Identity()));
  EXPECT_TRUE((J.d_state_k1.block<6, 6>(9, 9) == Eigen::Matrix<double, 6, 6>::Identity()));
}

TEST(ImuJacobians, ZeroPerturbationChangesNothing) {
  std::mt19937_64 rng(25);
  const PreintegratedImu pre = preintegrate(random_imu(rng, 21, 200.0), ImuBias{});
  const NavState a = random_state(rng), b = random_state(rng);
  EXPECT_EQ(imu_residual(pre, retract(a, Vec15::Zero()), b, kGravity),
            imu_residual(pre, a, b, kGravity));
}

TEST(ImuProperty, GravityCancelsAtAnyAttitude) {
  std::mt19937_64 rng(26);
  for (int i = 0; i < 10; ++i) {
    const UnitQuaternion q = random_rotation(rng);
    const auto samples = constant_stream(Vec3::Zero(), q.inverse() * kGravity, 1.0);
    const PreintegratedImu pre = preintegrate(samples, ImuBias{});
    NavState s;
    s.rotation = q;
    s.position = random_vec(rng, 3.0);
    NavState s1 = s;
    s1.timestamp = 1.0;
    const Vec15 r = imu_residual(pre, s, s1, kGravity);
    EXPECT_LT(r.head<6>().cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(ImuProperty, ChainingMatchesDirectIntegration) {
  std::mt19937_64 rng(27);
  const auto samples = random_imu(rng, 201, 200.0);
  const std::vector<ImuSample> s1(samples.begin(), samples.begin() + 101);
  const std::vector<ImuSample> s2(samples.begin() + 100, samples.end());
  NavState x = random_state(rng);
  x.bias = ImuBias{};
  const NavState whole = propagate(x, preintegrate(samples, ImuBias{}), kGravity);
  const NavState chained =
      propagate(propagate(x, preintegrate(s1, ImuBias{}), kGravity), preintegrate(s2, ImuBias{}),
                kGravity);
  EXPECT_LT((whole.position - chained.position).norm(), 1e-8);
  EXPECT_LT((whole.velocity - chained.velocity).norm(), 1e-8);
  EXPECT_LT(geom::angular_distance(whole.rotation, chained.rotation), 1e-8);
}

TEST(ImuProperty, CovarianceTraceGrows) {
  std::mt19937_64 rng(28);
  const auto samples = random_imu(rng, 60, 200.0);
  double last = 0.0;
  for (std::size_t n = 2; n <= samples.size(); ++n) {
    const PreintegratedImu pre =
        preintegrate(std::span<const ImuSample>(samples.data(), n), ImuBias{});
    const double tr = pre.covariance().trace();
    EXPECT_GT(tr, last);
    last = tr;
    EXPECT_LT((pre.covariance() - pre.covariance().transpose()).norm(), 1e-15);
  }
}

TEST(ImuProperty, BiasCorrectionErrorIsSecondOrder) {
  std::mt19937_64 rng(29);
  const auto samples = random_imu(rng, 41, 200.0);
  const PreintegratedImu pre = preintegrate(samples, ImuBias{});
  ImuBias dir;
  dir.accel = Vec3(0.2, -0.1, 0.15);
  dir.gyro = Vec3(0.02, 0.03, -0.02);
  auto correction_error = [&](double scale) {
    ImuBias b;
    b.accel = scale * dir.accel;
    b.gyro = scale * dir.gyro;
    const PreintegratedImu exact = preintegrate(samples, b);
    return (exact.alpha() - pre.corrected_alpha(b)).norm() +
           (exact.beta() - pre.corrected_beta(b)).norm() +
           geom::angular_distance(exact.gamma(), pre.corrected_gamma(b));
  };
  const double e1 = correction_error(1.0), e2 = correction_error(0.5);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(ImuProperty, RelinearizedMatchesFreshIntegration) {
  std::mt19937_64 rng(30);
  const auto samples = random_imu(rng, 21, 200.0);
  ImuBias b;
  b.accel = Vec3(0.1, 0.0, -0.1);
  const PreintegratedImu a = preintegrate(samples, ImuBias{}).relinearized(b);
  const PreintegratedImu c = preintegrate(samples, b);
  EXPECT_EQ(a.alpha(), c.alpha());
  EXPECT_EQ(a.beta(), c.beta());
  EXPECT_DOUBLE_EQ(a.bias_deviation(b), 0.0);
}

TEST(SliceImu, InterpolatesEnds) {
  const auto samples = constant_stream(Vec3(0, 0, 1), kGravity, 1.0);
  const auto s = slice_imu(samples, 0.1025, 0.2);
  ASSERT_GE(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s.front().timestamp, 0.1025);
  EXPECT_DOUBLE_EQ(s.back().timestamp, 0.2);
  EXPECT_TRUE(slice_imu(samples, 0.5, 2.0).empty());
}

}  // namespace
}  // namespace rio
