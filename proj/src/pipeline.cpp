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
 * \file pipeline.cpp
 */
#include "rio/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "rio/errors.hpp"

namespace rio {

NavState static_initialization(const std::vector<ImuSample> &imu, double start, double until) {
  Vec3 f = Vec3::Zero();
  std::size_t n = 0;
  for (const auto &s : imu) {
    if (s.timestamp < start || s.timestamp > until) continue;
    f += s.linear_acceleration;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::EmptyStream, "no IMU samples for static initialization");
  f /= static_cast<double>(n);
  const double roll = std::atan2(f.y(), f.z());
  const double pitch = std::atan2(-f.x(), std::hypot(f.y(), f.z()));
  NavState s;
  s.timestamp = start;
  s.rotation = UnitQuaternion::from_axis_angle(Vec3::UnitY(), pitch) *
               UnitQuaternion::from_axis_angle(Vec3::UnitX(), roll);
  return s;
}

namespace {

StampedPose stamped(const NavState &s) { return {s.timestamp, s.pose()}; }

void check_streams(const std::vector<RadarScan> &radar, const std::vector<ImuSample> &imu) {
  if (radar.empty()) throw Error(ErrorCode::EmptyStream, "radar stream is empty");
  if (imu.empty()) throw Error(ErrorCode::EmptyStream, "IMU stream is empty");
  for (std::size_t i = 1; i < radar.size(); ++i)
    if (!(radar[i].timestamp > radar[i - 1].timestamp))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "radar scans " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " are out of order");
  for (std::size_t i = 1; i < imu.size(); ++i)
    if (!(imu[i].timestamp > imu[i - 1].timestamp))
      throw Error(ErrorCode::NonMonotonicTimestamps,
                  "IMU samples " + std::to_string(i - 1) + " and " + std::to_string(i) +
                      " are out of order");
}

}  // namespace

PipelineResult run_pipeline(const RunConfig &config, const std::vector<RadarScan> &radar,
                            const std::vector<ImuSample> &imu,
                            const std::optional<NavState> &initial) {
  const auto t_start = std::chrono::steady_clock::now();
  check_streams(radar, imu);
  const EstimatorConfig &ecfg = config.estimator;
  const Vec3 gravity = ecfg.gravity_vector();
  const Extrinsics &extr = config.extrinsics;
  const UnitQuaternion body_to_radar = extr.radar_to_body.inverse();
  const Mode mode = config.mode;

  PipelineResult result;
  SlidingWindow window(ecfg, extr);
  std::mt19937_64 rng(config.seed);
  const RadarScan *previous_scan = nullptr;

  auto emit = [&result](const Frame &f) {
    result.trajectory.push_back(stamped(f.state));
    result.states.push_back(f.state);
  };

  for (std::size_t k = 0; k < radar.size(); ++k) {
    const RadarScan &scan = radar[k];
    FrameDiagnostics diag;
    diag.index = k;
    diag.timestamp = scan.timestamp;
    diag.input_points = scan.size();
    try {
      Frame frame;
      if (k == 0) {
        if (initial) {
          frame.state = *initial;
        } else {
          const double until = radar.size() > 1 ? radar[1].timestamp : scan.timestamp;
          frame.state = static_initialization(imu, imu.front().timestamp, until);
        }
        frame.state.timestamp = scan.timestamp;
      } else {
        const NavState &prev = window.frames().back().state;
        const auto samples = slice_imu(imu, prev.timestamp, scan.timestamp);
        if (samples.size() < 2)
          throw Error(ErrorCode::EmptyStream, "IMU data does not cover the frame interval");
        frame.imu = preintegrate(samples, prev.bias, config.imu_noise);
        frame.state = propagate(prev, *frame.imu, gravity);
        frame.state.timestamp = scan.timestamp;
      }

      // Preprocessing
      RadarScan cleaned = scan;
      if (config.outlier_removal && previous_scan && !window.empty()) {
        const NavState &prev = window.frames().back().state;
        const Pose prev_radar = prev.pose() * extr.pose();
        const Pose cur_radar = frame.state.pose() * extr.pose();
        OutlierResult o = remove_outliers(scan, *previous_scan, cur_radar.inverse() * prev_radar,
                                          config.outlier_radius);
        cleaned = std::move(o.scan);
      }
      diag.outlier_points = scan.size() - cleaned.size();

      DynamicSplit split = filter_dynamic(cleaned, body_to_radar, frame.state.rotation.inverse(),
                                          frame.state.velocity, config.dynamic_velocity_threshold,
                                          config.dynamic_ratio_threshold);
      diag.static_points = split.static_points.size();
      diag.dynamic_points = split.dynamic_points.size();

      const RadarScan &statics = split.static_points;
      if (!statics.empty()) {
        const IntervalGrid grid = divide_cloud(statics, config.grid);
        frame.weights = compute_interval_weights(grid);
        frame.doppler_points = statics.points;
        frame.cells = grid.assignment;
        frame.keypoints = extract_keypoints(statics, grid, config.keypoints_per_cell);
        build_histograms(frame.keypoints, config.histogram);
        std::size_t next = 0;
        for (std::size_t i = 0; i < statics.size(); ++i) {
          if (next < frame.keypoints.indices.size() && frame.keypoints.indices[next] == i) {
            ++next;
            continue;
          }
          frame.nonkey_points.push_back(statics.points[i].position);
        }
      } else {
        diag.notes.push_back("no static points");
      }
      diag.keypoints = frame.keypoints.size();

      // Registration against the previous frame
      std::vector<Correspondence> verified;
      bool registered = false;
      if (!window.empty()) {
        const KeypointCloud &prev_kp = window.frames().back().keypoints;
        if (prev_kp.size() > 0 && frame.keypoints.size() > 0) {
          const auto matches = match_keypoints(prev_kp, frame.keypoints, config.match);
          diag.matches = matches.size();
          const RansacResult rr = ransac_filter(matches, prev_kp, frame.keypoints, config.ransac, rng);
          if (rr.verified && rr.inliers.size() >= 3) {
            verified = rr.inliers;
            registered = true;
          }
        }
        diag.inliers = verified.size();
        if (frame.keypoints.size() < 3) diag.notes.push_back("fewer than 3 keypoints");
        if (!registered) diag.notes.push_back("registration failed");
        if (uses_p2p(mode) && (!registered || frame.keypoints.size() < 3)) diag.degraded = true;
      }

      if (auto dropped = window.advance(std::move(frame))) emit(*dropped);
      if (uses_p2p(mode)) window.manage_landmarks(verified);
      diag.landmarks = window.landmarks().size();
      diag.p2p_blocks = uses_p2p(mode) ? window.p2p_block_count() : 0;

      if (window.size() >= 2) {
        const SolveReport rep = solve_window(window, mode);
        diag.iterations = rep.iterations;
        diag.costs = rep.final_family_costs;
        diag.converged = rep.converged;
        diag.diverged = rep.diverged;
        if (rep.diverged) diag.notes.push_back("solver: " + rep.termination);
      } else {
        diag.converged = true;
      }
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw Error(e.code(), "frame " + std::to_string(k) + " (t=" +
                                format_double(scan.timestamp) + "): " + e.what());
    }
    previous_scan = &scan;
    result.diverged_frames += diag.diverged ? 1 : 0;
    result.degraded_frames += diag.degraded ? 1 : 0;
    result.frames.push_back(std::move(diag));
  }
  for (const Frame &f : window.frames()) emit(f);

  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

AteResult evaluate_ate(const std::vector<StampedPose> &estimate,
                       const std::vector<StampedPose> &reference, double tolerance) {
  std::vector<Vec3> est, ref;
  AteResult out;
  for (const auto &e : estimate) {
    const auto it = std::lower_bound(
        reference.begin(), reference.end(), e.timestamp,
        [](const StampedPose &p, double t) { return p.timestamp < t; });
    const StampedPose *best = nullptr;
    if (it != reference.end()) best = &*it;
    if (it != reference.begin()) {
      const StampedPose *before = &*(it - 1);
      if (!best || e.timestamp - before->timestamp <= best->timestamp - e.timestamp) best = before;
    }
    if (!best || std::abs(best->timestamp - e.timestamp) > tolerance) continue;
    est.push_back(e.pose.translation);
    ref.push_back(best->pose.translation);
    out.timestamps.push_back(e.timestamp);
  }
  if (est.empty()) throw Error(ErrorCode::NoAssociations, "no timestamps associate within tolerance");

  out.alignment = geom::rigid_align(ref, est);
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double e = (out.alignment * est[i] - ref[i]).norm();
    out.errors.push_back(e);
    sum += e * e;
  }
  out.rmse = std::sqrt(sum / static_cast<double>(est.size()));
  return out;
}

}  // namespace rio
