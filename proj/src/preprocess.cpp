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

#include "rio/preprocess.hpp"

#include <cmath>

#include "rio/errors.hpp"
#include "rio/kdtree.hpp"

namespace rio {

OutlierResult remove_outliers(const RadarScan &current, const RadarScan &previous,
                              const Pose &previous_to_current, double radius) {
  OutlierResult out;
  out.scan.timestamp = current.timestamp;
  if (current.empty() || previous.empty()) {
    out.scan = current;
    out.kept.resize(current.size());
    for (std::size_t i = 0; i < current.size(); ++i) out.kept[i] = i;
    out.passthrough = true;
    return out;
  }

  std::vector<Vec3> moved;
  moved.reserve(previous.size());
  for (const auto &p : previous.points) moved.push_back(previous_to_current * p.position);
  const KdTree tree(std::move(moved));

  for (std::size_t i = 0; i < current.size(); ++i) {
    if (tree.has_neighbor_within(current.points[i].position, radius)) {
      out.scan.points.push_back(current.points[i]);
      out.kept.push_back(i);
    }
  }
  return out;
}

double doppler_error(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                     const UnitQuaternion &world_to_body, const Vec3 &velocity_world) {
  const double range = point.position.norm();
  if (!(range > 0.0)) throw Error(ErrorCode::ZeroRangePoint, "point at the sensor origin");
  const Vec3 v_radar = body_to_radar * (world_to_body * velocity_world);
  return (point.position / range).dot(v_radar) + point.doppler;
}

DynamicSplit filter_dynamic(const RadarScan &scan, const UnitQuaternion &body_to_radar,
                            const UnitQuaternion &world_to_body, const Vec3 &velocity_world,
                            double v_thr, double p_thr) {
  if (!(v_thr > 0.0) || !(p_thr > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dynamic thresholds must be positive");
  DynamicSplit out;
  out.static_points.timestamp = scan.timestamp;
  out.dynamic_points.timestamp = scan.timestamp;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const RadarPoint &p = scan.points[i];
    const double e = doppler_error(p, body_to_radar, world_to_body, velocity_world);
    bool is_static = std::abs(e) < v_thr;
    if (is_static && p.doppler != 0.0) is_static = std::abs(e / p.doppler) < p_thr;
    if (is_static) {
      out.static_points.points.push_back(p);
      out.static_indices.push_back(i);
    } else {
      out.dynamic_points.points.push_back(p);
      out.dynamic_indices.push_back(i);
    }
  }
  return out;
}

int interval_index(double angle, double start, double res, int count, bool &clamped) {
  const double q = (angle - start) / res;
  double k = std::floor(q);
  // Angles that sit on a bin edge up to rounding belong to the upper bin.
  if (q - k > 1.0 - 1e-9) k += 1.0;
  clamped = false;
  if (k < 0.0) {
    clamped = true;
    return 0;
  }
  if (k > count - 1) {
    clamped = true;
    return count - 1;
  }
  return static_cast<int>(k);
}

IntervalGrid divide_cloud(const RadarScan &scan, const GridConfig &config) {
  if (config.azimuth_count < 1 || config.elevation_count < 1 || !(config.azimuth_res > 0.0) ||
      !(config.elevation_res > 0.0))
    throw Error(ErrorCode::InvalidArgument, "grid needs positive counts and resolutions");

  IntervalGrid grid;
  grid.config = config;
  grid.azimuth_counts.assign(static_cast<std::size_t>(config.azimuth_count), 0);
  grid.elevation_counts.assign(static_cast<std::size_t>(config.elevation_count), 0);
  grid.assignment.reserve(scan.size());
  for (const auto &p : scan.points) {
    bool ca = false, ce = false;
    CellIndex c;
    c.azimuth = interval_index(p.azimuth, config.azimuth_start, config.azimuth_res,
                               config.azimuth_count, ca);
    c.elevation = interval_index(p.elevation, config.elevation_start, config.elevation_res,
                                 config.elevation_count, ce);
    if (ca || ce) ++grid.out_of_fov;
    ++grid.azimuth_counts[static_cast<std::size_t>(c.azimuth)];
    ++grid.elevation_counts[static_cast<std::size_t>(c.elevation)];
    grid.assignment.push_back(c);
  }
  return grid;
}

}  // namespace rio
