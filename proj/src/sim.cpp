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
 * \file sim.cpp
 */
#include "rio/sim.hpp"

#include <cmath>
#include <map>
#include <random>

#include "rio/errors.hpp"

namespace rio::sim {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

UnitQuaternion from_euler(const Vec3 &rpy) {
  return UnitQuaternion::from_axis_angle(Vec3::UnitZ(), rpy.z()) *
         UnitQuaternion::from_axis_angle(Vec3::UnitY(), rpy.y()) *
         UnitQuaternion::from_axis_angle(Vec3::UnitX(), rpy.x());
}

}  // namespace

NavState TrajectorySample::state() const {
  NavState s;
  s.timestamp = timestamp;
  s.position = position;
  s.velocity = velocity;
  s.rotation = rotation;
  return s;
}

TrajectorySample EulerTrajectory::sample(double t) const {
  const Kinematics k = kinematics(t);
  TrajectorySample s;
  s.timestamp = t;
  s.position = k.position;
  s.velocity = k.velocity;
  s.acceleration = k.acceleration;
  s.rotation = from_euler(k.euler);
  const double sr = std::sin(k.euler.x()), cr = std::cos(k.euler.x());
  const double sp = std::sin(k.euler.y()), cp = std::cos(k.euler.y());
  const Vec3 &d = k.euler_rate;
  s.angular_velocity = Vec3(d.x() - d.z() * sp, d.y() * cr + d.z() * sr * cp,
                            -d.y() * sr + d.z() * cr * cp);
  return s;
}

TrajectorySample StationaryTrajectory::sample(double t) const {
  TrajectorySample s;
  s.timestamp = t;
  s.position = position_;
  s.rotation = rotation_;
  return s;
}

EulerTrajectory::Kinematics CircleTrajectory::kinematics(double t) const {
  const double w = p_.speed / p_.radius;
  const double a = w * t;
  const double r = p_.radius;
  const double wz = p_.vertical_frequency, az = p_.vertical_amplitude;
  const double wa = p_.attitude_frequency;
  Kinematics k;
  k.position = p_.center + Vec3(r * std::cos(a), r * std::sin(a), p_.height + az * std::sin(wz * t));
  k.velocity = Vec3(-r * w * std::sin(a), r * w * std::cos(a), az * wz * std::cos(wz * t));
  k.acceleration =
      Vec3(-r * w * w * std::cos(a), -r * w * w * std::sin(a), -az * wz * wz * std::sin(wz * t));
  k.euler = Vec3(p_.roll_amplitude * std::sin(wa * t), p_.pitch_amplitude * std::cos(wa * t),
                 a + M_PI / 2.0);
  k.euler_rate = Vec3(p_.roll_amplitude * wa * std::cos(wa * t),
                      -p_.pitch_amplitude * wa * std::sin(wa * t), w);
  return k;
}

EulerTrajectory::Kinematics WeaveTrajectory::kinematics(double t) const {
  const double A = p_.weave_amplitude, w = p_.weave_frequency;
  const double Az = p_.vertical_amplitude, wz = p_.vertical_frequency;
  const double s = p_.speed;
  Kinematics k;
  k.position = p_.start + Vec3(s * t, A * std::sin(w * t), Az * std::sin(wz * t));
  k.velocity = Vec3(s, A * w * std::cos(w * t), Az * wz * std::cos(wz * t));
  k.acceleration = Vec3(0.0, -A * w * w * std::sin(w * t), -Az * wz * wz * std::sin(wz * t));
  const double vy = k.velocity.y(), ay = k.acceleration.y();
  k.euler = Vec3(0.0, 0.0, std::atan2(vy, s));
  k.euler_rate = Vec3(0.0, 0.0, s * ay / (s * s + vy * vy));
  return k;
}

TrajectorySample ConstantTwistTrajectory::sample(double t) const {
  TrajectorySample s;
  s.timestamp = t;
  s.position = start_.position + t * start_.velocity + 0.5 * t * t * accel_;
  s.velocity = start_.velocity + t * accel_;
  s.acceleration = accel_;
  s.rotation = start_.rotation * UnitQuaternion::exp(t * rate_);
  s.angular_velocity = rate_;
  return s;
}

SimWorld make_world(const ScatterConfig &c, std::uint64_t seed) {
  SimWorld world;
  world.seed = seed;
  auto rng = make_rng(seed, 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < c.count; ++i) {
    // uniform over the annulus area
    const double r = std::sqrt(c.r_min * c.r_min + u01(rng) * (c.r_max * c.r_max - c.r_min * c.r_min));
    const double phi = 2.0 * M_PI * u01(rng);
    const double z = c.z_min + (c.z_max - c.z_min) * u01(rng);
    SimLandmark l;
    l.id = i;
    l.position = c.center + Vec3(r * std::cos(phi), r * std::sin(phi), z);
    l.rcs = c.rcs_min + (c.rcs_max - c.rcs_min) * u01(rng);
    world.landmarks.push_back(l);
  }
  return world;
}

void add_box_landmarks(SimWorld &world, std::size_t count, const Vec3 &lo, const Vec3 &hi,
                       double rcs_min, double rcs_max, std::uint64_t seed, int cluster) {
  auto rng = make_rng(seed, 2 + world.landmarks.size());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    SimLandmark l;
    l.id = world.landmarks.size();
    for (int a = 0; a < 3; ++a) l.position[a] = lo[a] + (hi[a] - lo[a]) * u01(rng);
    l.rcs = rcs_min + (rcs_max - rcs_min) * u01(rng);
    l.cluster = cluster;
    world.landmarks.push_back(l);
  }
}

void add_movers(SimWorld &world, std::size_t count, const Vec3 &lo, const Vec3 &hi,
                double speed, std::uint64_t seed) {
  auto rng = make_rng(seed, 3 + world.landmarks.size());
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    SimLandmark l;
    l.id = world.landmarks.size();
    for (int a = 0; a < 3; ++a) l.position[a] = lo[a] + (hi[a] - lo[a]) * u01(rng);
    const double heading = 2.0 * M_PI * u01(rng);
    l.velocity = speed * Vec3(std::cos(heading), std::sin(heading), 0.0);
    l.rcs = 10.0 + 20.0 * u01(rng);
    world.landmarks.push_back(l);
  }
}

std::vector<ImuSample> gen_imu(const Trajectory &trajectory, double t0, double t1,
                               const ImuSimConfig &config, std::uint64_t seed) {
  if (!(config.rate > 0.0)) throw Error(ErrorCode::InvalidArgument, "IMU rate must be > 0");
  auto rng = make_rng(seed, 0x1a2b);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto gauss3 = [&] { return Vec3(n01(rng), n01(rng), n01(rng)); };
  const double dt = 1.0 / config.rate;
  const Vec3 gravity_up(0.0, 0.0, config.gravity);

  ImuBias bias = config.bias;
  std::vector<ImuSample> out;
  const auto first = static_cast<long long>(std::ceil(t0 * config.rate - 1e-9));
  for (long long i = first;; ++i) {
    const double t = static_cast<double>(i) / config.rate;
    if (t > t1 + 1e-12) break;
    const TrajectorySample s = trajectory.sample(t);
    ImuSample m;
    m.timestamp = t;
    m.angular_velocity = s.angular_velocity + bias.gyro;
    m.linear_acceleration = s.rotation.inverse() * (s.acceleration + gravity_up) + bias.accel;
    if (config.noisy) {
      m.angular_velocity += config.noise.gyro_noise_density / std::sqrt(dt) * gauss3();
      m.linear_acceleration += config.noise.accel_noise_density / std::sqrt(dt) * gauss3();
      if (config.bias_random_walk) {
        bias.gyro += config.noise.gyro_random_walk * std::sqrt(dt) * gauss3();
        bias.accel += config.noise.accel_random_walk * std::sqrt(dt) * gauss3();
      }
    }
    out.push_back(m);
  }
  return out;
}

LabeledScan gen_radar_scan(const SimWorld &world, const Trajectory &trajectory, double t,
                           const RadarSimConfig &config, std::uint64_t seed) {
  auto rng = make_rng(seed, 0x5ca9);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  const TrajectorySample s = trajectory.sample(t);
  const Pose world_to_radar = (s.state().pose() * config.extrinsics.pose()).inverse();
  const Vec3 radar_velocity =
      s.velocity + s.rotation * s.angular_velocity.cross(config.extrinsics.translation);

  LabeledScan out;
  out.scan.timestamp = t;
  auto visible = [&](const Vec3 &p) {
    const double r = p.norm();
    if (r < config.min_range || r > config.max_range) return false;
    const double az = std::atan2(p.y(), p.x());
    const double el = std::atan2(p.z(), std::hypot(p.x(), p.y()));
    return std::abs(az) <= config.azimuth_fov && std::abs(el) <= config.elevation_fov;
  };

  std::map<int, double> cluster_error;
  auto shared_error = [&](int cluster) {
    auto it = cluster_error.find(cluster);
    if (it == cluster_error.end()) {
      auto crng = make_rng(seed, 0xc100 + static_cast<std::uint64_t>(cluster));
      it = cluster_error.emplace(cluster, config.cluster_doppler_noise * n01(crng)).first;
    }
    return it->second;
  };

  for (const SimLandmark &l : world.landmarks) {
    const Vec3 p = world_to_radar * l.position_at(t);
    if (!visible(p)) continue;
    if (config.detection_probability < 1.0 && u01(rng) > config.detection_probability) continue;
    const Vec3 rel = world_to_radar.rotation * (l.velocity - radar_velocity);
    double doppler = (p / p.norm()).dot(rel);
    double rcs = l.rcs;
    Vec3 q = p;
    if (config.position_noise > 0.0)
      q += config.position_noise * Vec3(n01(rng), n01(rng), n01(rng));
    if (config.doppler_noise > 0.0) doppler += config.doppler_noise * n01(rng);
    if (config.cluster_doppler_noise > 0.0 && l.cluster >= 0) doppler += shared_error(l.cluster);
    if (config.rcs_jitter > 0.0) rcs += config.rcs_jitter * (2.0 * u01(rng) - 1.0);
    out.scan.points.push_back(RadarPoint::make(q, doppler, rcs));
    out.labels.push_back(l.is_static() ? PointLabel::Static : PointLabel::Dynamic);
    out.landmark_ids.push_back(static_cast<std::int64_t>(l.id));
  }

  const auto clutter =
      static_cast<std::size_t>(std::lround(config.clutter_fraction * out.scan.size()));
  for (std::size_t i = 0; i < clutter; ++i) {
    const double az = config.azimuth_fov * (2.0 * u01(rng) - 1.0);
    const double el = config.elevation_fov * (2.0 * u01(rng) - 1.0);
    const double r = config.min_range + (config.max_range - config.min_range) * u01(rng);
    const Vec3 p = r * Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    out.scan.points.push_back(RadarPoint::make(p, 6.0 * u01(rng) - 3.0, 20.0 * u01(rng)));
    out.labels.push_back(PointLabel::Clutter);
    out.landmark_ids.push_back(-1);
  }
  return out;
}

std::vector<std::string> preset_names() { return {"circle60", "aniso", "sparse", "twist"}; }

Preset make_preset(const std::string &name, bool noisy, std::uint64_t seed) {
  Preset p;
  p.name = name;
  p.imu.noisy = noisy;
  if (noisy) {
    p.imu.bias.accel = Vec3(0.02, -0.01, 0.015);
    p.imu.bias.gyro = Vec3(1e-3, -5e-4, 8e-4);
    p.radar.position_noise = 0.05;
    p.radar.doppler_noise = 0.05;
    p.radar.rcs_jitter = 0.5;
  }

  if (name == "circle60" || name == "sparse") {
    CircleTrajectory::Params c;
    c.vertical_amplitude = 0.2;
    c.vertical_frequency = 0.5;
    c.roll_amplitude = 2.0 * M_PI / 180.0;
    c.pitch_amplitude = 2.0 * M_PI / 180.0;
    c.attitude_frequency = 0.7;
    p.trajectory = std::make_shared<CircleTrajectory>(c);
    ScatterConfig sc;
    sc.count = name == "circle60" ? 500 : 12;
    sc.r_min = 14.0;
    p.world = make_world(sc, seed);
    p.duration = name == "circle60" ? 60.0 : 20.0;
  } else if (name == "aniso") {
    WeaveTrajectory::Params w;
    p.trajectory = std::make_shared<WeaveTrajectory>(w);
    p.duration = 15.0;
    p.world.seed = seed;
    // 90% of the landmarks in a narrow cluster far ahead, the rest spread
    // along both sides of the route.
    add_box_landmarks(p.world, 180, Vec3(140.0, -5.0, 1.5), Vec3(160.0, 5.0, 5.0), 0.0, 40.0,
                      seed, 0);
    add_box_landmarks(p.world, 10, Vec3(0.0, 4.0, -1.0), Vec3(60.0, 20.0, 6.0), 0.0, 40.0, seed);
    add_box_landmarks(p.world, 10, Vec3(0.0, -20.0, -1.0), Vec3(60.0, -4.0, 6.0), 0.0, 40.0,
                      seed);
    if (noisy) p.radar.cluster_doppler_noise = 0.15;
    p.radar.max_range = 200.0;
  } else if (name == "twist") {
    NavState start;
    start.position = Vec3(0.0, 0.0, 1.0);
    start.velocity = Vec3(2.0, 0.0, 0.0);
    p.trajectory = std::make_shared<ConstantTwistTrajectory>(start, Vec3(0.1, 0.05, 0.02),
                                                             Vec3(0.01, -0.02, 0.1));
    ScatterConfig sc;
    sc.count = 400;
    sc.r_min = 6.0;
    sc.r_max = 35.0;
    p.world = make_world(sc, seed);
    p.duration = 5.0;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown preset '" + name + "'");
  }
  return p;
}

Dataset generate(const Preset &preset, std::uint64_t seed) {
  Dataset d;
  const auto frames = static_cast<long long>(std::floor(preset.duration * preset.radar_rate + 1e-9));
  for (long long i = 0; i <= frames; ++i) {
    const double t = static_cast<double>(i) / preset.radar_rate;
    LabeledScan s = gen_radar_scan(preset.world, *preset.trajectory, t, preset.radar,
                                   seed * 1000003ULL + static_cast<std::uint64_t>(i));
    d.scans.push_back(std::move(s.scan));
    d.labels.push_back(std::move(s.labels));
    NavState gt = preset.trajectory->sample(t).state();
    gt.bias = preset.imu.bias;
    d.ground_truth.push_back(gt);
  }
  d.imu = gen_imu(*preset.trajectory, 0.0, d.ground_truth.back().timestamp, preset.imu, seed);
  return d;
}

}  // namespace rio::sim
