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
 * \file preprocess.hpp
 * \brief Radar scan cleaning: random-point removal, IMU-aided dynamic point
 * removal and angular cloud division.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "rio/types.hpp"

namespace rio {

struct OutlierResult {
  RadarScan scan;
  std::vector<std::size_t> kept;  // indices into the input scan
  /// Set when either scan was empty and the input was passed through as-is.
  bool passthrough = false;
};

/// Keeps the points of `current` that have at least one point of `previous`,
/// mapped by `previous_to_current` (previous radar frame -> current radar
/// frame), within `radius`.
OutlierResult remove_outliers(const RadarScan &current, const RadarScan &previous,
                              const Pose &previous_to_current, double radius);

/// Static-point consistency of a detection:
///   (p/|p|)^T R_b^r R_w^b v^w + doppler.
/// Zero for a static target when the rotation and velocity are exact. Throws
/// ZeroRangePoint for a point at the sensor origin.
double doppler_error(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                     const UnitQuaternion &world_to_body, const Vec3 &velocity_world);

struct DynamicSplit {
  RadarScan static_points;
  RadarScan dynamic_points;
  std::vector<std::size_t> static_indices;
  std::vector<std::size_t> dynamic_indices;
};

/// Static iff |e| < v_thr and |e / doppler| < p_thr, where e is doppler_error.
/// A point with doppler == 0 passes the ratio test.
DynamicSplit filter_dynamic(const RadarScan &scan, const UnitQuaternion &body_to_radar,
                            const UnitQuaternion &world_to_body, const Vec3 &velocity_world,
                            double v_thr, double p_thr);

/// Azimuth/elevation interval layout. Bins are half-open:
///   k <= (angle - start) / res < k + 1.
struct GridConfig {
  double azimuth_start = -60.0 * M_PI / 180.0;
  double azimuth_res = 4.0 * M_PI / 180.0;
  int azimuth_count = 30;
  double elevation_start = -15.0 * M_PI / 180.0;
  double elevation_res = 3.0 * M_PI / 180.0;
  int elevation_count = 10;
};

struct CellIndex {
  int azimuth = 0;
  int elevation = 0;
};

struct IntervalGrid {
  GridConfig config;
  std::vector<CellIndex> assignment;  // one per input point
  std::vector<int> azimuth_counts;
  std::vector<int> elevation_counts;
  /// Points outside the configured field of view; they are clamped into the
  /// nearest edge interval.
  std::size_t out_of_fov = 0;

  int cell_id(const CellIndex &c) const { return c.azimuth * config.elevation_count + c.elevation; }
};

/// Throws InvalidArgument on a malformed config.
IntervalGrid divide_cloud(const RadarScan &scan, const GridConfig &config);

/// Interval index of `angle`; `clamped` reports an out-of-range value.
int interval_index(double angle, double start, double res, int count, bool &clamped);

}  // namespace rio
