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
 * \file doppler.hpp
 * \brief Spatially weighted Doppler velocity residuals.
 *
 * Every nonempty azimuth (elevation) interval k with n_k points gets the raw
 * weight 1/sqrt(n_k), so each interval contributes the same total constraint
 * sum_i w_k^2 = 1. The raw weights of each axis are then mapped affinely onto
 * [1, 10]. The weighted residual of a point with elevation theta in azimuth
 * interval i and elevation interval j is
 *
 *   [w_i sin(theta); w_j cos(theta)] * r_D.
 */
#pragma once

#include <Eigen/Core>
#include <vector>

#include "rio/preprocess.hpp"
#include "rio/types.hpp"

namespace rio {

inline constexpr double kWeightMin = 1.0;
inline constexpr double kWeightMax = 10.0;

struct IntervalWeights {
  /// Raw 1/sqrt(n); 0 for empty intervals.
  std::vector<double> azimuth_raw, elevation_raw;
  /// Normalized onto [1, 10]; 0 for empty intervals.
  std::vector<double> azimuth, elevation;
};

/// Throws EmptyGrid when either axis has no points.
IntervalWeights compute_interval_weights(const IntervalGrid &grid);

/// Which interval weight multiplies sin(theta).
enum class WeightPairing {
  AzimuthSin,  // [w_az sin; w_el cos]
  ElevationSin,  // [w_el sin; w_az cos]
};

/// Unweighted residual; same expression as doppler_error.
double doppler_residual(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                        const UnitQuaternion &world_to_body, const Vec3 &velocity_world);

/// 2x1 weight vector multiplying r_D for a point in `cell`.
Eigen::Vector2d weight_vector(const RadarPoint &point, const CellIndex &cell,
                              const IntervalWeights &weights,
                              WeightPairing pairing = WeightPairing::AzimuthSin);

Eigen::Vector2d weighted_doppler_residual(const RadarPoint &point, const CellIndex &cell,
                                          const IntervalWeights &weights,
                                          const UnitQuaternion &body_to_radar,
                                          const UnitQuaternion &world_to_body,
                                          const Vec3 &velocity_world,
                                          WeightPairing pairing = WeightPairing::AzimuthSin);

/// Jacobians of the unweighted residual with respect to the world velocity and
/// the right-perturbation of q_b^w. Those of the weighted residual are the
/// weight vector times these rows.
struct DopplerJacobian {
  Eigen::RowVector3d d_velocity;
  Eigen::RowVector3d d_rotation;
};

DopplerJacobian doppler_jacobians(const RadarPoint &point, const UnitQuaternion &body_to_radar,
                                  const UnitQuaternion &body_to_world,
                                  const Vec3 &velocity_world);

}  // namespace rio
