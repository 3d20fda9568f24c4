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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "rio/errors.hpp"
#include "rio/pipeline.hpp"
#include "rio/sim.hpp"

namespace rio {
namespace {

namespace fs = std::filesystem;

std::vector<StampedPose> poses_of(const std::vector<NavState> &states) {
  std::vector<StampedPose> out;
  for (const auto &s : states) out.push_back({s.timestamp, s.pose()});
  return out;
}

struct PresetRun {
  sim::Dataset data;
  PipelineResult result;
  double ate = 0.0;
};

PresetRun run_preset(const std::string &name, bool noisy, std::uint64_t seed, Mode mode,
               double duration = 0.0) {
  sim::Preset preset = sim::make_preset(name, noisy, seed);
  if (duration > 0.0) preset.duration = duration;
  PresetRun r{sim::generate(preset, seed), {}, 0.0};
  RunConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  r.result = run_pipeline(cfg, r.data.scans, r.data.imu, r.data.ground_truth.front());
  r.ate = evaluate_ate(r.result.trajectory, poses_of(r.data.ground_truth)).rmse;
  return r;
}

TEST(Ate, Examples) {
  std::vector<StampedPose> ref;
  for (int i = 0; i < 50; ++i)
    ref.push_back({0.1 * i, Pose(UnitQuaternion(), Vec3(std::cos(0.2 * i), std::sin(0.3 * i), 0.1 * i))});
  EXPECT_EQ(evaluate_ate(ref, ref).rmse, 0.0);
  std::vector<StampedPose> shifted = ref;
  for (auto &p : shifted) p.pose.translation += Vec3(1, 0, 0);
  EXPECT_LT(evaluate_ate(shifted, ref).rmse, 1e-12);
  std::vector<StampedPose> moved = ref;
  const Pose T(UnitQuaternion::from_axis_angle(Vec3(1, 2, 3).normalized(), 0.7), Vec3(4, -2, 1));
  for (auto &p : moved) p.pose = T * p.pose;
  EXPECT_LT(evaluate_ate(moved, ref).rmse, 1e-12);
}

TEST(Ate, IsotropicNoiseScalesWithSqrtThree) {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> n(0.0, 0.05);
  std::vector<StampedPose> ref, est;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(10 * std::cos(0.01 * i), 10 * std::sin(0.01 * i), 0.01 * i);
    ref.push_back({0.1 * i, Pose(UnitQuaternion(), p)});
    est.push_back({0.1 * i, Pose(UnitQuaternion(), p + Vec3(n(rng), n(rng), n(rng)))});
  }
  EXPECT_NEAR(evaluate_ate(est, ref).rmse, 0.05 * std::sqrt(3.0), 0.15 * 0.05 * std::sqrt(3.0));
}

TEST(Ate, AssociationTolerance) {
  const std::vector<StampedPose> ref{{0.0, Pose()}, {1.0, Pose()}};
  const std::vector<StampedPose> est{{0.5, Pose()}};
  try {
    evaluate_ate(est, ref);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NoAssociations);
  }
  EXPECT_EQ(evaluate_ate(est, ref, 0.6).errors.size(), 1u);
}

TEST(StaticInitialization, RecoversRollAndPitch) {
  const UnitQuaternion q = UnitQuaternion::from_axis_angle(Vec3::UnitY(), 0.1) *
                           UnitQuaternion::from_axis_angle(Vec3::UnitX(), -0.2);
  const sim::StationaryTrajectory traj(Vec3::Zero(), q);
  const auto imu = sim::gen_imu(traj, 0.0, 1.0, sim::ImuSimConfig{}, 1);
  const NavState s = static_initialization(imu, 0.0, 0.5);
  EXPECT_LT(geom::angular_distance(s.rotation, q), 1e-12);
  EXPECT_EQ(s.velocity, Vec3::Zero());
}

TEST(Pipeline, NoiseFreeCircleIsAccurate) {
  const PresetRun r = run_preset("circle60", false, 1, Mode::Full, 15.0);
  EXPECT_LT(r.ate, 0.1);
  EXPECT_EQ(r.result.trajectory.size(), r.data.scans.size());
  EXPECT_EQ(r.result.diverged_frames, 0u);
  for (std::size_t k = 0; k < r.result.trajectory.size(); ++k)
    EXPECT_EQ(r.result.trajectory[k].timestamp, r.data.scans[k].timestamp);
  std::size_t matched = 0;
  for (const auto &f : r.result.frames) matched += f.inliers;
  EXPECT_GT(matched, 0u);
}

TEST(Pipeline, SparseSceneDegradesGracefully) {
  const PresetRun r = run_preset("sparse", false, 2, Mode::P2PImu);
  EXPECT_GT(r.result.degraded_frames, 0u);
  EXPECT_EQ(r.result.trajectory.size(), r.data.scans.size());
  bool noted = false;
  for (const auto &f : r.result.frames)
    for (const auto &n : f.notes) noted = noted || n.find("keypoints") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(Pipeline, EmptyStreamsAreErrors) {
  const sim::Preset preset = sim::make_preset("twist", false, 3);
  const sim::Dataset d = sim::generate(preset, 3);
  try {
    run_pipeline(RunConfig{}, {}, d.imu);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyStream);
  }
  EXPECT_THROW(run_pipeline(RunConfig{}, d.scans, {}), Error);
  std::vector<RadarScan> swapped = d.scans;
  std::swap(swapped[2], swapped[3]);
  try {
    run_pipeline(RunConfig{}, swapped, d.imu);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::NonMonotonicTimestamps);
  }
}

TEST(Pipeline, Deterministic) {
  const PresetRun a = run_preset("twist", true, 4, Mode::Full);
  const PresetRun b = run_preset("twist", true, 4, Mode::Full);
  ASSERT_EQ(a.result.trajectory.size(), b.result.trajectory.size());
  EXPECT_EQ(format_tum(a.result.trajectory), format_tum(b.result.trajectory));
}

// Full ranks at or below both single-family modes on every noise-free preset.
TEST(Pipeline, NoiseFreeAblationOrdering) {
  for (const char *name : {"twist", "aniso", "circle60"}) {
    std::map<Mode, double> ate;
    for (Mode m : {Mode::WeightedDopplerImu, Mode::P2PImu, Mode::Full})
      ate[m] = run_preset(name, false, 1, m).ate;
    for (const auto &[m, v] : ate)
      RecordProperty(std::string(name) + "_" + to_string(m), format_double(v));
    EXPECT_LE(ate[Mode::Full], ate[Mode::WeightedDopplerImu]) << name;
    EXPECT_LE(ate[Mode::Full], ate[Mode::P2PImu]) << name;
  }
}

// The command-line tool, driven end to end.
class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("rio_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  int rio(const std::string &args) {
    const std::string cmd = std::string(RIO_CLI_PATH) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string path(const std::string &name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(Cli, SimulateRunEval) {
  ASSERT_EQ(rio("simulate --preset twist --seed 3 --out " + path("data")), 0);
  for (const char *f : {"radar.csv", "imu.csv", "ground_truth.txt", "initial_state.csv"})
    EXPECT_TRUE(fs::exists(path("data/") + f)) << f;
  ASSERT_EQ(rio("run --data " + path("data") + " --mode WD-IMU --out " + path("a")), 0);
  ASSERT_EQ(rio("run --data " + path("data") + " --mode WD-IMU --out " + path("b")), 0);
  EXPECT_TRUE(fs::exists(path("a/diagnostics.json")));
  EXPECT_EQ(read_file(path("a/trajectory.txt")), read_file(path("b/trajectory.txt")));
  EXPECT_EQ(rio("eval --est " + path("a/trajectory.txt") + " --ref " + path("data/ground_truth.txt") +
                " --json " + path("m.json")),
            0);
  EXPECT_NE(read_file(path("m.json")).find("\"rmse\""), std::string::npos);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(rio(""), 1);
  EXPECT_EQ(rio("frobnicate"), 1);
  EXPECT_EQ(rio("run --out " + path("x")), 1);
  EXPECT_EQ(rio("run --radar " + path("none.csv") + " --imu " + path("none.csv") + " --out " +
                path("x")),
            2);
  write_file_atomic(path("empty.csv"), "");
  write_file_atomic(path("imu.csv"), "timestamp,wx,wy,wz,ax,ay,az\n0,0,0,0,0,0,9.81\n");
  EXPECT_EQ(rio("run --radar " + path("empty.csv") + " --imu " + path("imu.csv") + " --out " +
                path("out")),
            2);
  EXPECT_FALSE(fs::exists(path("out/trajectory.txt")));
  EXPECT_EQ(rio("run --radar " + path("imu.csv") + " --imu " + path("imu.csv") + " --out " +
                path("out")),
            2);
  write_file_atomic(path("bad.cfg"), "window_size = 0\n");
  ASSERT_EQ(rio("simulate --preset twist --out " + path("data")), 0);
  EXPECT_EQ(rio("run --data " + path("data") + " -c " + path("bad.cfg") + " --out " + path("o")), 2);
  EXPECT_NE(read_file(path("stdout.txt")).find("bad.cfg:1"), std::string::npos);
}

}  // namespace
}  // namespace rio
