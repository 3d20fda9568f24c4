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
#include <map>
#include <random>

#include "rio/estimator.hpp"
#include "rio/sim.hpp"
#include "support.hpp"

namespace rio {
namespace {

using testing::random_rotation;
using testing::random_state;
using testing::random_vec;
using testing::relative_error;

Extrinsics tilted_mount() {
  Extrinsics e;
  e.radar_to_body = UnitQuaternion::from_axis_angle(Vec3(0.1, 1.0, 0.2).normalized(), 0.05);
  return e;
}

TEST(P2P, Examples) {
  const Extrinsics I;
  NavState s;
  const Vec3 p(4, -2, 1);
  EXPECT_EQ(p2p_residual(p, p, s, I), Vec3::Zero());
  NavState moved = s;
  moved.position += Vec3(1, 0, 0);
  EXPECT_EQ(p2p_residual(p, p, moved, I) - p2p_residual(p, p, s, I), Vec3(-1, 0, 0));
}

TEST(P2P, JacobiansMatchFiniteDifferences) {
  std::mt19937_64 rng(51);
  for (int i = 0; i < 100; ++i) {
    Extrinsics e;
    e.radar_to_body = random_rotation(rng);
    e.translation = random_vec(rng, 0.5);
    const NavState s = random_state(rng);
    const Vec3 point = random_vec(rng, 10.0), landmark = random_vec(rng, 10.0);
    const P2PJacobians J = p2p_jacobians(point, s, e);
    const std::function<Vec3(const NavState &)> f = [&](const NavState &x) {
      return p2p_residual(landmark, point, x, e);
    };
    const std::function<NavState(const NavState &, const Vec15 &)> plus = retract;
    const auto num = testing::numeric_jacobian<3, 15, NavState>(f, s, plus);
    EXPECT_LT(relative_error(J.d_position, num.block<3, 3>(0, 0)), 1e-6);
    EXPECT_LT(relative_error(J.d_rotation, num.block<3, 3>(0, 6)), 1e-6);
    EXPECT_LT((num.block<3, 3>(0, 3).norm() + num.block<3, 6>(0, 9).norm()), 1e-9);
    EXPECT_EQ(J.d_landmark, Mat3::Identity());
  }
}

TEST(HuberLoss, QuadraticInsideLinearOutside) {
  const Huber h{0.1};
  const double d2 = 0.01, eps = 1e-6;
  EXPECT_EQ(h.rho(d2 - eps), d2 - eps);
  EXPECT_EQ(h.rho(0.0), 0.0);
  EXPECT_EQ(h.drho(d2 - eps), 1.0);
  EXPECT_NEAR(h.rho(d2 + eps), 2 * 0.1 * std::sqrt(d2 + eps) - d2, 1e-15);
  EXPECT_LT(h.rho(d2 + eps), d2 + eps);
  // Continuous at the knee, growth linear in |r| beyond it.
  EXPECT_NEAR(h.rho(d2 + 1e-12), d2, 1e-11);
  for (double r : {0.2, 1.0, 10.0})
    EXPECT_NEAR(h.rho((2 * r) * (2 * r)) - h.rho(r * r), 2 * 0.1 * r, 1e-12);
}

TEST(ModeNames, RoundTrip) {
  for (Mode m : {Mode::DopplerImu, Mode::WeightedDopplerImu, Mode::P2PImu, Mode::Full})
    EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_EQ(parse_mode("wd-imu"), Mode::WeightedDopplerImu);
  EXPECT_FALSE(parse_mode("fast").has_value());
}

/// A noise-free window of `count` frames at ground truth, with one landmark
/// per simulated landmark seen in at least two frames.
struct TestWindow {
  sim::Preset preset;
  std::vector<NavState> truth;
  SlidingWindow window;
};

TestWindow ground_truth_window(int count, const EstimatorConfig &cfg = EstimatorConfig{}) {
  sim::Preset preset = sim::make_preset("twist", false, 5);
  preset.radar.extrinsics = tilted_mount();
  TestWindow tw{preset, {}, SlidingWindow(cfg, preset.radar.extrinsics)};
  const double dt = 1.0 / preset.radar_rate;
  const auto imu = sim::gen_imu(*preset.trajectory, 0.0, count * dt, preset.imu, 1);
  std::map<std::int64_t, int> seen;
  std::vector<sim::LabeledScan> scans;
  for (int k = 0; k < count; ++k) {
    scans.push_back(sim::gen_radar_scan(preset.world, *preset.trajectory, k * dt, preset.radar, k));
    for (auto id : scans.back().landmark_ids) ++seen[id];
  }
  std::map<std::int64_t, LandmarkId> ids;
  for (const auto &[sim_id, n] : seen)
    if (n >= 2)
      ids[sim_id] = tw.window.add_landmark(preset.world.landmarks[sim_id].position,
                                           LandmarkSource::Keypoint);
  for (int k = 0; k < count; ++k) {
    const double t = k * dt;
    Frame f;
    f.state = preset.trajectory->sample(t).state();
    tw.truth.push_back(f.state);
    if (k > 0) f.imu = preintegrate(slice_imu(imu, t - dt, t), ImuBias{});
    const RadarScan &scan = scans[k].scan;
    const IntervalGrid grid = divide_cloud(scan, GridConfig{});
    f.doppler_points = scan.points;
    f.cells = grid.assignment;
    f.weights = compute_interval_weights(grid);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const auto it = ids.find(scans[k].landmark_ids[i]);
      if (it != ids.end()) f.observations.push_back({it->second, scan.points[i].position, false});
    }
    tw.window.advance(std::move(f));
    tw.window.frames().back().state = tw.truth.back();
  }
  return tw;
}

TEST(Window, CapacityAndImuBlocks) {
  EstimatorConfig cfg;
  cfg.window_size = 10;
  SlidingWindow w(cfg, Extrinsics{});
  std::mt19937_64 rng(52);
  const auto samples = testing::random_imu(rng, 21, 200.0);
  for (int k = 0; k < 10; ++k) {
    Frame f;
    if (k > 0) f.imu = preintegrate(samples, ImuBias{});
    EXPECT_FALSE(w.advance(std::move(f)).has_value());
  }
  EXPECT_EQ(w.size(), 10u);
  EXPECT_EQ(w.imu_block_count(), 9u);
  Frame f;
  f.imu = preintegrate(samples, ImuBias{});
  EXPECT_TRUE(w.advance(std::move(f)).has_value());
  EXPECT_EQ(w.size(), 10u);
  // The new oldest frame's pre-integration reaches outside the window.
  EXPECT_EQ(w.imu_block_count(), 9u);
}

TEST(Window, AdvancePropagatesNewestState) {
  SlidingWindow w(EstimatorConfig{}, Extrinsics{});
  std::mt19937_64 rng(53);
  Frame first;
  first.state = random_state(rng);
  w.advance(first);
  Frame second;
  second.imu = preintegrate(testing::random_imu(rng, 21, 200.0), first.state.bias);
  second.state.timestamp = 7.0;
  w.advance(second);
  const NavState expected = propagate(first.state, *second.imu, Vec3(0, 0, kDefaultGravity));
  EXPECT_EQ(w.frames().back().state.position, expected.position);
  EXPECT_EQ(w.frames().back().state.timestamp, 7.0);
}

/// Keypoint cloud whose points sit at the given radar-frame positions.
KeypointCloud keypoints_at(const std::vector<Vec3> &pts) {
  KeypointCloud c;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.indices.push_back(i);
    c.positions.push_back(pts[i]);
    c.rcs.push_back(1.0);
  }
  return c;
}

TEST(Landmarks, MatchesCreateAndChainLandmarks) {
  EstimatorConfig cfg;
  cfg.window_size = 4;
  SlidingWindow w(cfg, Extrinsics{});
  const std::vector<Vec3> pts{{5, 0, 0}, {6, 1, 0}, {7, -1, 1}};
  std::vector<Correspondence> same;
  for (std::size_t i = 0; i < 3; ++i) same.push_back({i, i, 9.0, true});

  for (int k = 0; k < 4; ++k) {
    Frame f;
    f.state.position = Vec3(0.1 * k, 0, 0);
    f.keypoints = keypoints_at(pts);
    w.advance(std::move(f));
    w.manage_landmarks(k == 0 ? std::vector<Correspondence>{} : same);
    if (k == 1) {
      ASSERT_EQ(w.landmarks().size(), 3u);
      // Initialized from the first observation.
      EXPECT_EQ(w.landmarks().at(0).position, pts[0]);
    }
  }
  EXPECT_EQ(w.landmarks().size(), 3u);
  for (const auto &[id, l] : w.landmarks()) EXPECT_EQ(l.observation_count, 4);
  EXPECT_EQ(w.p2p_block_count(), 12u);

  // Frames without matches let the landmarks age out.
  for (int k = 0; k < 4; ++k) {
    Frame f;
    w.advance(std::move(f));
    w.manage_landmarks({});
  }
  EXPECT_TRUE(w.landmarks().empty());
  EXPECT_EQ(w.p2p_block_count(), 0u);
}

TEST(Landmarks, NonkeyPointsNeedRepeatedAssociation) {
  EstimatorConfig cfg;
  cfg.window_size = 10;
  SlidingWindow w(cfg, Extrinsics{});
  for (int k = 0; k < 5; ++k) {
    Frame f;
    f.nonkey_points = {Vec3(10.0 + 0.01 * k, 0, 0)};
    w.advance(std::move(f));
    w.manage_landmarks({});
    ASSERT_EQ(w.landmarks().size(), 1u);
    const Landmark &l = w.landmarks().begin()->second;
    EXPECT_EQ(l.source, LandmarkSource::PromotedNonkey);
    EXPECT_EQ(l.observation_count, k + 1);
    // Active once observed more than three times.
    EXPECT_EQ(w.p2p_block_count(), k + 1 > 3 ? static_cast<std::size_t>(k + 1) : 0u);
  }
}

TEST(Solve, GroundTruthIsOptimal) {
  TestWindow tw = ground_truth_window(6);
  ASSERT_GT(tw.window.landmarks().size(), 20u);
  const FamilyCosts c = window_cost(tw.window, Mode::Full);
  EXPECT_LT(c.total(), 1e-12);
  const SolveReport r = solve_window(tw.window, Mode::Full);
  EXPECT_LT(r.final_cost, 1e-12);
  for (std::size_t k = 0; k < tw.truth.size(); ++k)
    EXPECT_LT((tw.window.frames()[k].state.position - tw.truth[k].position).norm(), 1e-9);
}

TEST(Solve, RecoversFromPerturbation) {
  for (Mode mode : {Mode::Full, Mode::WeightedDopplerImu, Mode::DopplerImu, Mode::P2PImu}) {
    TestWindow tw = ground_truth_window(6);
    std::mt19937_64 rng(54);
    for (std::size_t k = 1; k < tw.window.size(); ++k) {
      NavState &s = tw.window.frames()[k].state;
      s.position += 0.1 * random_vec(rng).normalized();
      s.rotation = s.rotation * UnitQuaternion::exp(M_PI / 180.0 * random_vec(rng).normalized());
    }
    for (auto &[id, l] : tw.window.landmarks()) l.position += random_vec(rng, 0.05);
    const SolveReport r = solve_window(tw.window, mode);
    EXPECT_FALSE(r.diverged) << to_string(mode);
    for (std::size_t k = 0; k < tw.truth.size(); ++k) {
      const NavState &s = tw.window.frames()[k].state;
      EXPECT_LT((s.position - tw.truth[k].position).norm(), 1e-4) << to_string(mode) << " " << k;
      EXPECT_LT(geom::angular_distance(s.rotation, tw.truth[k].rotation), 0.01 * M_PI / 180.0)
          << to_string(mode) << " " << k;
    }
  }
}

TEST(Solve, FirstPoseIsBitIdenticalAndQuaternionsStayUnit) {
  TestWindow tw = ground_truth_window(6);
  std::mt19937_64 rng(55);
  for (auto &f : tw.window.frames()) {
    f.state.position += random_vec(rng, 0.2);
    f.state.velocity += random_vec(rng, 0.2);
    f.state.rotation = f.state.rotation * UnitQuaternion::exp(random_vec(rng, 0.03));
  }
  const NavState first = tw.window.frames().front().state;
  solve_window(tw.window, Mode::Full);
  const NavState &after = tw.window.frames().front().state;
  EXPECT_EQ(after.position, first.position);
  EXPECT_EQ(after.rotation.w(), first.rotation.w());
  EXPECT_EQ(after.rotation.x(), first.rotation.x());
  EXPECT_EQ(after.rotation.y(), first.rotation.y());
  EXPECT_EQ(after.rotation.z(), first.rotation.z());
  EXPECT_EQ(after.bias.accel, first.bias.accel);
  EXPECT_EQ(after.bias.gyro, first.bias.gyro);
  for (const auto &f : tw.window.frames()) EXPECT_NEAR(f.state.rotation.norm(), 1.0, 1e-9);
}

TEST(Solve, CostNeverIncreases) {
  std::vector<double> costs;
  for (int iters = 1; iters <= 8; ++iters) {
    EstimatorConfig cfg;
    cfg.max_iterations = iters;
    TestWindow tw = ground_truth_window(5, cfg);
    std::mt19937_64 rng(56);
    for (std::size_t k = 1; k < tw.window.size(); ++k) {
      tw.window.frames()[k].state.position += random_vec(rng, 0.3);
      tw.window.frames()[k].state.velocity += random_vec(rng, 0.3);
    }
    const SolveReport r = solve_window(tw.window, Mode::Full);
    EXPECT_LE(r.final_cost, r.initial_cost);
    costs.push_back(r.final_cost);
  }
  for (std::size_t i = 1; i < costs.size(); ++i) EXPECT_LE(costs[i], costs[i - 1]);
}

TEST(Solve, ModesSelectFamilies) {
  TestWindow tw = ground_truth_window(4);
  for (auto &[id, l] : tw.window.landmarks()) l.position += Vec3(0.3, 0, 0);
  tw.window.frames().back().state.velocity += Vec3(0.2, 0, 0);
  EXPECT_EQ(window_cost(tw.window, Mode::P2PImu).doppler, 0.0);
  EXPECT_GT(window_cost(tw.window, Mode::P2PImu).p2p, 0.0);
  EXPECT_EQ(window_cost(tw.window, Mode::DopplerImu).p2p, 0.0);
  EXPECT_GT(window_cost(tw.window, Mode::DopplerImu).doppler, 0.0);
  EXPECT_NE(window_cost(tw.window, Mode::DopplerImu).doppler,
            window_cost(tw.window, Mode::WeightedDopplerImu).doppler);
}

}  // namespace
}  // namespace rio
