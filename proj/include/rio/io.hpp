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
 * \file io.hpp
 * \brief Dataset and trajectory files.
 *
 * Radar:      timestamp,x,y,z,doppler,rcs        (rows grouped by timestamp)
 * IMU:        timestamp,wx,wy,wz,ax,ay,az
 * State:      timestamp,px,py,pz,vx,vy,vz,qx,qy,qz,qw,bax,bay,baz,bgx,bgy,bgz
 * Trajectory: "timestamp tx ty tz qx qy qz qw" per line (TUM), '#' comments
 *
 * Numbers are written in shortest round-trip form, so save -> load is
 * bit-exact. Every write goes to a temporary file renamed into place.
 */
#pragma once

#include <string>
#include <vector>

#include "rio/types.hpp"

namespace rio {

struct StampedPose {
  double timestamp = 0.0;
  Pose pose;
};

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Writes `content` to `path` via a temporary file and rename.
void write_file_atomic(const std::string &path, const std::string &content);
std::string read_file(const std::string &path);

std::vector<RadarScan> load_radar_csv(const std::string &path);
std::vector<RadarScan> parse_radar_csv(const std::string &text, const std::string &source);
std::string format_radar_csv(const std::vector<RadarScan> &scans);
void save_radar_csv(const std::string &path, const std::vector<RadarScan> &scans);

std::vector<ImuSample> load_imu_csv(const std::string &path);
std::vector<ImuSample> parse_imu_csv(const std::string &text, const std::string &source);
std::string format_imu_csv(const std::vector<ImuSample> &samples);
void save_imu_csv(const std::string &path, const std::vector<ImuSample> &samples);

std::vector<NavState> load_state_csv(const std::string &path);
std::string format_state_csv(const std::vector<NavState> &states);
void save_state_csv(const std::string &path, const std::vector<NavState> &states);

/// Timestamps must strictly increase and quaternions be unit-norm within 1e-6.
std::vector<StampedPose> load_tum(const std::string &path);
std::vector<StampedPose> parse_tum(const std::string &text, const std::string &source);
std::string format_tum(const std::vector<StampedPose> &poses);
void save_tum(const std::string &path, const std::vector<StampedPose> &poses);

}  // namespace rio
