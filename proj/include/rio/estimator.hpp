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
 * \file estimator.hpp
 * \brief Sliding-window radar-inertial estimator.
 *
 * The window holds the last n frame states and the landmarks they observe.
 * One solve minimizes
 *
 *   sum |r_I|^2_P  +  sum rho(|w_D r_D|^2)  +  sum w_P rho(|r_P|^2)
 *
 * over all window states and live landmarks with Levenberg-Marquardt, where
 * rho is the Huber loss and the IMU terms are whitened by the pre-integration
 * covariance. The first state's pose and biases are held fixed. States that
 * leave the window are dropped without a marginalization prior.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rio/doppler.hpp"
#include "rio/imu_preint.hpp"
#include "rio/lgc.hpp"
#include "rio/types.hpp"

namespace rio {

/// Active residual families.
enum class Mode {
  DopplerImu,          // unweighted Doppler + IMU
  WeightedDopplerImu,  // weighted Doppler + IMU
  P2PImu,              // point-to-point + IMU
  Full,                // weighted Doppler + point-to-point + IMU
};

const char *to_string(Mode mode);
/// Accepts "D-IMU", "WD-IMU", "P2P-IMU", "Full" (case-insensitive).
std::optional<Mode> parse_mode(const std::string &text);

inline bool uses_doppler(Mode m) { return m != Mode::P2PImu; }
inline bool uses_weights(Mode m) { return m == Mode::WeightedDopplerImu || m == Mode::Full; }
inline bool uses_p2p(Mode m) { return m == Mode::P2PImu || m == Mode::Full; }

struct EstimatorConfig {
  int window_size = 10;
  double huber_delta = 0.1;
  double p2p_weight = 1.0;
  double gravity = kDefaultGravity;
  double bias_relinearize_threshold = 1e-2;
  WeightPairing pairing = WeightPairing::AzimuthSin;
  int max_iterations = 50;
  double gradient_tolerance = 1e-8;
  double step_tolerance = 1e-10;
  /// Stops once the model predicts a relative cost decrease below this, the
  /// level where double round-off hides any further progress.
  double cost_tolerance = 1e-12;
  double initial_damping = 1e-6;
  /// A landmark seen by non-key points contributes once its count exceeds this.
  int nonkey_min_observations = 3;
  double nonkey_association_radius = 0.5;  // m

  Vec3 gravity_vector() const { return {0.0, 0.0, gravity}; }
};

/// Huber loss on a squared norm s: s inside delta^2, 2 delta sqrt(s) - delta^2
/// beyond. Returns rho and its derivative.
struct Huber {
  double delta;
  double rho(double s) const;
  double drho(double s) const;
};

using LandmarkId = std::uint64_t;

enum class LandmarkSource { Keypoint, PromotedNonkey };

struct Landmark {
  LandmarkId id = 0;
  Vec3 position = Vec3::Zero();  // world frame
  int observation_count = 1;
  LandmarkSource source = LandmarkSource::Keypoint;
};

struct Observation {
  LandmarkId landmark = 0;
  Vec3 point = Vec3::Zero();  // radar frame
  bool nonkey = false;
};

/// Everything one radar frame contributes to the window.
struct Frame {
  NavState state;
  /// Pre-integration from the previous frame to this one (absent for the
  /// first frame of a stream).
  std::optional<PreintegratedImu> imu;
  /// Static points and their grid cells, for the Doppler residuals.
  std::vector<RadarPoint> doppler_points;
  std::vector<CellIndex> cells;
  IntervalWeights weights;
  KeypointCloud keypoints;
  std::vector<std::optional<LandmarkId>> keypoint_landmarks;
  /// Static points that are not keypoints (radar frame).
  std::vector<Vec3> nonkey_points;
  std::vector<Observation> observations;
};

/// Point-to-point residual l - (R_b^w (R_r^b p + t_rb) + p_b^w).
Vec3 p2p_residual(const Vec3 &landmark, const Vec3 &point, const NavState &state,
                  const Extrinsics &extrinsics);

struct P2PJacobians {
  Mat3 d_position;  // w.r.t. dp of the state
  Mat3 d_rotation;  // w.r.t. dtheta of the state
  Mat3 d_landmark;
};

P2PJacobians p2p_jacobians(const Vec3 &point, const NavState &state,
                           const Extrinsics &extrinsics);

class SlidingWindow {
 public:
  SlidingWindow(EstimatorConfig config, Extrinsics extrinsics);

  const EstimatorConfig &config() const { return config_; }
  const Extrinsics &extrinsics() const { return extrinsics_; }
  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  const std::deque<Frame> &frames() const { return frames_; }
  std::deque<Frame> &frames() { return frames_; }
  const std::map<LandmarkId, Landmark> &landmarks() const { return landmarks_; }
  std::map<LandmarkId, Landmark> &landmarks() { return landmarks_; }

  /// Appends a frame. When the window is not empty and the frame carries a
  /// pre-integration, its state is replaced by the IMU propagation of the
  /// newest state. Drops the oldest frame beyond capacity (returned) and
  /// retires landmarks without observations.
  std::optional<Frame> advance(Frame frame);

  /// Records verified matches between the previous frame's keypoints
  /// (index_a) and the newest frame's keypoints (index_b), then associates
  /// the newest frame's non-key points with nearby landmarks.
  void manage_landmarks(const std::vector<Correspondence> &matches);

  LandmarkId add_landmark(const Vec3 &position, LandmarkSource source);
  /// Removes landmarks that no frame in the window observes.
  void retire_landmarks();

  /// Whether an observation enters the P2P residuals.
  bool is_active(const Observation &obs) const;

  std::size_t imu_block_count() const;
  std::size_t doppler_block_count() const;
  std::size_t p2p_block_count() const;

 private:
  EstimatorConfig config_;
  Extrinsics extrinsics_;
  std::deque<Frame> frames_;
  std::map<LandmarkId, Landmark> landmarks_;
  LandmarkId next_id_ = 0;
};

struct FamilyCosts {
  double imu = 0.0;
  double doppler = 0.0;
  double p2p = 0.0;
  double total() const { return imu + doppler + p2p; }
};

struct SolveReport {
  int iterations = 0;        // accepted steps
  int evaluations = 0;       // attempted steps
  double initial_cost = 0.0;
  double final_cost = 0.0;
  FamilyCosts final_family_costs;
  bool converged = false;
  bool diverged = false;     // cost could not be reduced at maximum damping
  std::string termination;
  std::size_t landmarks = 0; // landmarks in the problem
};

/// Robustified cost of the window (0.5 * sum of terms) split by family.
FamilyCosts window_cost(const SlidingWindow &window, Mode mode);

/// Largest absolute raw residual component per family.
struct ResidualMaxima {
  double imu = 0.0;
  double doppler = 0.0;
  double p2p = 0.0;
};
ResidualMaxima window_residual_maxima(const SlidingWindow &window, Mode mode);

/// One Levenberg-Marquardt solve of the window in place. The first state's
/// pose and biases are held fixed (its velocity is free); the pose is left
/// bit-identical.
SolveReport solve_window(SlidingWindow &window, Mode mode);

}  // namespace rio
