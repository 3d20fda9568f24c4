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
 * \file types.hpp
 * \brief Sensor samples and estimator state shared across modules.
 */
#pragma once

#include <cmath>
#include <vector>

#include "rio/geom.hpp"

namespace rio {

using geom::Pose;
using geom::UnitQuaternion;

struct ImuSample {
  double timestamp = 0.0;
  Vec3 angular_velocity = Vec3::Zero();     // rad/s, body frame
  Vec3 linear_acceleration = Vec3::Zero();  // m/s^2, specific force, body frame
};

struct ImuBias {
  Vec3 accel = Vec3::Zero();  // m/s^2
  Vec3 gyro = Vec3::Zero();   // rad/s
};

/// One frame's IMU state: body pose in world, world velocity and biases.
struct NavState {
  double timestamp = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  UnitQuaternion rotation;  // q_b^w
  ImuBias bias;

  Pose pose() const { return {rotation, position}; }
};

/// A single radar detection in the radar frame.
struct RadarPoint {
  Vec3 position = Vec3::Zero();  // m
  double doppler = 0.0;          // m/s, negative when approaching
  double rcs = 0.0;              // dBsm
  double azimuth = 0.0;          // rad, atan2(y, x)
  double elevation = 0.0;        // rad, above the x-y plane

  static RadarPoint make(const Vec3 &position, double doppler, double rcs) {
    RadarPoint p;
    p.position = position;
    p.doppler = doppler;
    p.rcs = rcs;
    p.azimuth = std::atan2(position.y(), position.x());
    p.elevation = std::atan2(position.z(), std::hypot(position.x(), position.y()));
    return p;
  }

  double range() const { return position.norm(); }
};

struct RadarScan {
  double timestamp = 0.0;
  std::vector<RadarPoint> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Fixed radar-to-body calibration: p^b = R_r^b p^r + t_rb.
struct Extrinsics {
  UnitQuaternion radar_to_body;
  Vec3 translation = Vec3::Zero();  // radar origin in the body frame

  Pose pose() const { return {radar_to_body, translation}; }
};

}  // namespace rio
