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
 * \file sim.hpp
 * \brief Synthetic worlds, trajectories, IMU streams and radar scans.
 *
 * Physical gravity points down, [0, 0, -g], so a level IMU at rest reads
 * specific force [0, 0, +g]. Attitudes of the analytic trajectories are ZYX
 * Euler angles (yaw, pitch, roll) with body x forward.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rio/imu_preint.hpp"
#include "rio/types.hpp"

namespace rio::sim {

struct TrajectorySample {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();      // world
  Vec3 acceleration = Vec3::Zero();  // world, kinematic (gravity excluded)
  UnitQuaternion rotation;           // q_b^w
  Vec3 angular_velocity = Vec3::Zero();  // body

  NavState state() const;
};

class Trajectory {
 public:
  virtual ~Trajectory() = default;
  virtual TrajectorySample sample(double t) const = 0;
};

/// Analytic position plus ZYX Euler attitude with their derivatives.
class EulerTrajectory : public Trajectory {
 public:
  struct Kinematics {
    Vec3 position, velocity, acceleration;
    Vec3 euler;       // roll, pitch, yaw
    Vec3 euler_rate;  // their time derivatives
  };
  TrajectorySample sample(double t) const override;
  virtual Kinematics kinematics(double t) const = 0;
};

/// Rest at a fixed pose.
class StationaryTrajectory : public Trajectory {
 public:
  StationaryTrajectory(Vec3 position, UnitQuaternion rotation)
      : position_(std::move(position)), rotation_(rotation) {}
  TrajectorySample sample(double t) const override;

 private:
  Vec3 position_;
  UnitQuaternion rotation_;
};

/// Horizontal circle traversed counter-clockwise at constant speed, heading
/// along the tangent, with optional small vertical and roll/pitch
/// oscillations.
class CircleTrajectory : public EulerTrajectory {
 public:
  struct Params {
    Vec3 center = Vec3::Zero();
    double radius = 10.0;        // m
    double speed = 2.0;          // m/s
    double height = 1.0;         // m above center
    double vertical_amplitude = 0.0;  // m
    double vertical_frequency = 0.0;  // rad/s
    double roll_amplitude = 0.0;      // rad
    double pitch_amplitude = 0.0;     // rad
    double attitude_frequency = 0.0;  // rad/s
  };
  explicit CircleTrajectory(Params p) : p_(p) {}
  Kinematics kinematics(double t) const override;
  const Params &params() const { return p_; }

 private:
  Params p_;
};

/// Straight drive along +x with a sinusoidal lateral weave; heading follows
/// the velocity direction.
class WeaveTrajectory : public EulerTrajectory {
 public:
  struct Params {
    Vec3 start = Vec3(0.0, 0.0, 1.0);
    double speed = 3.0;               // m/s along x
    double weave_amplitude = 1.0;     // m
    double weave_frequency = 0.5;     // rad/s
    double vertical_amplitude = 0.0;  // m
    double vertical_frequency = 0.0;  // rad/s
  };
  explicit WeaveTrajectory(Params p) : p_(p) {}
  Kinematics kinematics(double t) const override;

 private:
  Params p_;
};

/// Constant world acceleration and constant body rate. Midpoint IMU
/// integration is exact on it.
class ConstantTwistTrajectory : public Trajectory {
 public:
  ConstantTwistTrajectory(NavState start, Vec3 acceleration_world, Vec3 body_rate)
      : start_(std::move(start)), accel_(std::move(acceleration_world)),
        rate_(std::move(body_rate)) {}
  TrajectorySample sample(double t) const override;

 private:
  NavState start_;
  Vec3 accel_;
  Vec3 rate_;
};

struct SimLandmark {
  std::uint64_t id = 0;
  Vec3 position = Vec3::Zero();  // at t = 0
  double rcs = 0.0;              // dBsm
  Vec3 velocity = Vec3::Zero();  // zero for static landmarks
  int cluster = -1;              // landmarks of one cluster share Doppler error

  bool is_static() const { return velocity.isZero(0.0); }
  Vec3 position_at(double t) const { return position + t * velocity; }
};

struct SimWorld {
  std::vector<SimLandmark> landmarks;
  std::uint64_t seed = 0;
};

/// Uniformly scattered static landmarks in the annulus r_min..r_max around
/// `center`, heights in [z_min, z_max], RCS uniform in [rcs_min, rcs_max].
struct ScatterConfig {
  std::size_t count = 500;
  Vec3 center = Vec3::Zero();
  double r_min = 15.0, r_max = 40.0;
  double z_min = -1.0, z_max = 4.0;
  double rcs_min = 0.0, rcs_max = 40.0;
};
SimWorld make_world(const ScatterConfig &config, std::uint64_t seed);

/// Appends landmarks uniformly inside the axis-aligned box [lo, hi].
void add_box_landmarks(SimWorld &world, std::size_t count, const Vec3 &lo, const Vec3 &hi,
                       double rcs_min, double rcs_max, std::uint64_t seed, int cluster = -1);

/// Appends moving landmarks.
void add_movers(SimWorld &world, std::size_t count, const Vec3 &lo, const Vec3 &hi,
                double speed, std::uint64_t seed);

/// White noise standard deviations come from the densities as sigma * sqrt(rate).
struct ImuSimConfig {
  double rate = 200.0;  // Hz
  bool noisy = false;
  ImuNoise noise;
  ImuBias bias;             // constant offset
  bool bias_random_walk = false;
  double gravity = kDefaultGravity;
};

/// Samples at t0 + i / rate for every i with t0 + i / rate <= t1.
std::vector<ImuSample> gen_imu(const Trajectory &trajectory, double t0, double t1,
                               const ImuSimConfig &config, std::uint64_t seed);

struct RadarSimConfig {
  Extrinsics extrinsics;
  double azimuth_fov = 60.0 * M_PI / 180.0;    // half angle
  double elevation_fov = 15.0 * M_PI / 180.0;  // half angle
  double min_range = 1.0;
  double max_range = 60.0;
  double detection_probability = 1.0;
  double position_noise = 0.0;  // m, per axis
  double doppler_noise = 0.0;   // m/s
  double rcs_jitter = 0.0;      // dBsm, uniform half width
  /// Doppler error drawn once per scan and cluster and added to every
  /// detection of that cluster, m/s. Models one extended reflector whose
  /// returns are not independent.
  double cluster_doppler_noise = 0.0;
  /// Clutter points per scan as a fraction of the real detections.
  double clutter_fraction = 0.0;
};

enum class PointLabel { Static, Dynamic, Clutter };

struct LabeledScan {
  RadarScan scan;
  std::vector<PointLabel> labels;
  /// Source landmark id per point; -1 for clutter.
  std::vector<std::int64_t> landmark_ids;
};

/// Detections of `world` seen from the trajectory at time t.
LabeledScan gen_radar_scan(const SimWorld &world, const Trajectory &trajectory, double t,
                           const RadarSimConfig &config, std::uint64_t seed);

struct Preset {
  std::string name;
  SimWorld world;
  std::shared_ptr<const Trajectory> trajectory;
  double duration = 0.0;
  double radar_rate = 10.0;
  ImuSimConfig imu;
  RadarSimConfig radar;
};

/// Known presets: "circle60", "aniso", "sparse", "twist". `noisy` switches on
/// the preset's sensor noise.
Preset make_preset(const std::string &name, bool noisy, std::uint64_t seed);
std::vector<std::string> preset_names();

struct Dataset {
  std::vector<RadarScan> scans;
  std::vector<std::vector<PointLabel>> labels;
  std::vector<ImuSample> imu;
  std::vector<NavState> ground_truth;  // at every radar timestamp
};

/// Radar scans at i / radar_rate for t in [0, duration], IMU covering the same
/// span.
Dataset generate(const Preset &preset, std::uint64_t seed);

}  // namespace rio::sim
