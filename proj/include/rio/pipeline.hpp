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
 * \file pipeline.hpp
 * \brief Per-frame odometry driver and trajectory evaluation.
 *
 * Per radar frame: pre-integrate the IMU since the previous frame, predict
 * the state, drop isolated points against the previous scan, split static
 * from dynamic points, divide the static cloud into intervals, weigh them,
 * extract and describe keypoints, match them to the previous frame, then
 * advance and solve the sliding window. A frame's pose is reported once it
 * leaves the window (the rest at the end of the stream), so every reported
 * pose has been refined by all solves that included it.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rio/config.hpp"
#include "rio/io.hpp"

namespace rio {

struct FrameDiagnostics {
  std::size_t index = 0;
  double timestamp = 0.0;
  std::size_t input_points = 0;
  std::size_t outlier_points = 0;
  std::size_t static_points = 0;
  std::size_t dynamic_points = 0;
  std::size_t keypoints = 0;
  std::size_t matches = 0;
  std::size_t inliers = 0;
  std::size_t landmarks = 0;
  std::size_t p2p_blocks = 0;
  int iterations = 0;
  FamilyCosts costs;
  bool converged = false;
  bool diverged = false;
  /// Registration was impossible for this frame (fewer than 3 keypoints or
  /// unverifiable matches) while point-to-point residuals were requested.
  bool degraded = false;
  std::vector<std::string> notes;
};

struct PipelineResult {
  std::vector<StampedPose> trajectory;  // body poses, one per radar frame
  std::vector<NavState> states;         // same frames, full state
  std::vector<FrameDiagnostics> frames;
  std::size_t diverged_frames = 0;
  std::size_t degraded_frames = 0;
  double runtime_seconds = 0.0;
};

/// Gravity-aligned start from the IMU samples up to `until`: zero velocity,
/// zero yaw, roll and pitch from the mean specific force. Throws EmptyStream
/// when no sample lies in range.
NavState static_initialization(const std::vector<ImuSample> &imu, double start, double until);

/// Runs the odometry over the whole stream. Without `initial`, the first
/// state is found by static_initialization over the first radar interval.
/// Module errors are rethrown with the frame index prepended.
PipelineResult run_pipeline(const RunConfig &config, const std::vector<RadarScan> &radar,
                            const std::vector<ImuSample> &imu,
                            const std::optional<NavState> &initial = std::nullopt);

struct AteResult {
  double rmse = 0.0;
  std::vector<double> errors;  // per associated pose, m
  std::vector<double> timestamps;
  Pose alignment;  // maps estimate positions onto the reference
};

/// Associates each estimate with the nearest reference timestamp within
/// `tolerance`, aligns rigidly (no scale) and returns the translational RMSE.
/// Throws NoAssociations when nothing associates. Collinear trajectories are
/// accepted (the alignment is then not unique, the RMSE is).
AteResult evaluate_ate(const std::vector<StampedPose> &estimate,
                       const std::vector<StampedPose> &reference, double tolerance = 0.01);

}  // namespace rio
