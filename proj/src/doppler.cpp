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

#include "rio/doppler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rio/errors.hpp"

namespace rio {

namespace {

void weigh_axis(const std::vector<int> &counts, std::vector<double> &raw,
                std::vector<double> &normalized) {
  raw.assign(counts.size(), 0.0);
  normalized.assign(counts.size(), 0.0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] <= 0) continue;
    raw[k] = 1.0 / std::sqrt(static_cast<double>(counts[k]));
    lo = std::min(lo, raw[k]);
    hi = std::max(hi, raw[k]);
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] <= 0) continue;
    normalized[k] = hi > lo ? (raw[k] - lo) / (hi - lo) * (kWeightMax - kWeightMin) + kWeightMin
                            : kWeightMin;
  }
}

}  // namespace

IntervalWeights compute_interval_weights(const IntervalGrid &grid) {
  auto any = [](const std::vector<int> &c) {
    return std::any_of(c.begin(), c.end(), [](int n) { return n > 0; });
  };
  if (!any(grid.azimuth_counts) || !any(grid.elevation_counts))
    throw Error(ErrorCode::EmptyGrid, "no points in the interval grid");
  IntervalWeights w;
  weigh_axis(grid.azimuth_counts, w.azimuth_raw, w.azimuth);
  weigh_axis(grid.elevation_counts, w.elevation_raw, w.elevation);
  return w;
}

double doppler_residual(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                        const UnitQuaternion &world_to_body, const Vec3 &velocity_world) {
  const double range = point.position.norm();
  if (!(range > 0.0)) throw Error(ErrorCode::ZeroRangePoint, "point at the sensor origin");
  return (point.position / range).dot(body_to_radar * (world_to_body * velocity_world)) +
         point.doppler;
}

Eigen::Vector2d weight_vector(const RadarPoint &point, const CellIndex &cell,
                              const IntervalWeights &weights, WeightPairing pairing) {
  const double wa = weights.azimuth[static_cast<std::size_t>(cell.azimuth)];
  const double we = weights.elevation[static_cast<std::size_t>(cell.elevation)];
  const double s = std::sin(point.elevation);
  const double c = std::cos(point.elevation);
  if (pairing == WeightPairing::AzimuthSin) return {wa * s, we * c};
  return {we * s, wa * c};
}

Eigen::Vector2d weighted_doppler_residual(const RadarPoint &point, const CellIndex &cell,
                                          const IntervalWeights &weights,
                                          const UnitQuaternion &body_to_radar,
                                          const UnitQuaternion &world_to_body,
                                          const Vec3 &velocity_world, WeightPairing pairing) {
  return weight_vector(point, cell, weights, pairing) *
         doppler_residual(point, body_to_radar, world_to_body, velocity_world);
}

DopplerJacobian doppler_jacobians(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                                  const UnitQuaternion &body_to_world,
                                  const Vec3 &velocity_world) {
  const double range = point.position.norm();
  if (!(range > 0.0)) throw Error(ErrorCode::ZeroRangePoint, "point at the sensor origin");
  const Eigen::RowVector3d u_body =
      (point.position / range).transpose() * body_to_radar.matrix();
  const Mat3 Rwb = body_to_world.matrix().transpose();
  DopplerJacobian J;
  J.d_velocity = u_body * Rwb;
  J.d_rotation = u_body * geom::skew(Rwb * velocity_world);
  return J;
}

}  // namespace rio
