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
 * \file config.hpp
 * \brief Run configuration as a flat `key = value` file.
 *
 * Blank lines and lines starting with '#' are ignored. Unknown keys, bad
 * values and out-of-range values are errors naming the line. `profile`
 * (ars548 | eagle_g7) resets the histogram and NHI settings to that radar's
 * defaults, so later lines can still override single values.
 *
 * Keys and defaults:
 *
 *   mode                      Full        D-IMU | WD-IMU | P2P-IMU | Full
 *   profile                   ars548
 *   window_size               10
 *   huber_delta               0.1
 *   p2p_weight                1.0
 *   gravity                   9.81        m/s^2
 *   max_iterations            50
 *   initial_damping           1e-6
 *   cost_tolerance            1e-12       relative predicted decrease
 *   weight_pairing            azimuth_sin azimuth_sin | elevation_sin
 *   nonkey_min_observations   3
 *   nonkey_radius             0.5         m
 *   outlier_removal           true
 *   outlier_radius            0.5         m
 *   dynamic_velocity_threshold 0.4        m/s
 *   dynamic_ratio_threshold   0.25
 *   keypoints_per_cell        30
 *   azimuth_start_deg         -60
 *   azimuth_res_deg           4
 *   azimuth_count             30
 *   elevation_start_deg       -15
 *   elevation_res_deg         3
 *   elevation_count           10
 *   hist_distance_bin_width   0.2         m
 *   hist_rcs_bin_width        1           dBsm
 *   hist_distance_bins        100
 *   hist_rcs_bins             50
 *   hist_rcs_origin           0           dBsm
 *   hist_neighbors            30
 *   rcs_screen                3           dBsm
 *   nhi_threshold             5
 *   nhi_radius                1
 *   ransac_inlier_distance    0.5         m
 *   ransac_iterations         200
 *   imu_accel_noise           0.01        m/s^2/sqrt(Hz)
 *   imu_gyro_noise            0.001       rad/s/sqrt(Hz)
 *   imu_accel_walk            0.001       m/s^3/sqrt(Hz)
 *   imu_gyro_walk             0.0001      rad/s^2/sqrt(Hz)
 *   extrinsic_rotation        0 0 0 1     qx qy qz qw, radar to body
 *   extrinsic_translation     0 0 0       m, radar origin in body
 *   seed                      0
 */
#pragma once

#include <cstdint>
#include <string>

#include "rio/estimator.hpp"
#include "rio/lgc.hpp"
#include "rio/preprocess.hpp"

namespace rio {

struct RunConfig {
  Mode mode = Mode::Full;
  EstimatorConfig estimator;
  ImuNoise imu_noise;
  Extrinsics extrinsics;
  GridConfig grid;
  HistogramConfig histogram;
  MatchConfig match;
  RansacConfig ransac;
  int keypoints_per_cell = 30;
  bool outlier_removal = true;
  double outlier_radius = 0.5;
  double dynamic_velocity_threshold = 0.4;
  double dynamic_ratio_threshold = 0.25;
  std::uint64_t seed = 0;

  /// Applies a radar profile's histogram and NHI defaults. Throws
  /// InvalidConfig for an unknown name.
  void apply_profile(const std::string &name);
};

/// Throws InvalidConfig (via ParseError) naming the offending line.
RunConfig parse_config(const std::string &text, const std::string &source);
RunConfig load_config(const std::string &path);
/// Every key with its current value, in a form parse_config accepts.
std::string format_config(const RunConfig &config);

}  // namespace rio
