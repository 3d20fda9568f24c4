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
 * \file lgc.hpp
 * \brief Local-geometry + RCS histogram descriptors and their matching.
 *
 * Keypoints are the K strongest (highest RCS) static points of every
 * azimuth x elevation cell. Each keypoint is described by a 2D histogram over
 * (distance to neighbour, neighbour RCS) of its k nearest keypoints.
 * Histograms are compared with a neighbourhood-expanded intersection: each
 * occupied bin of A takes the best min(A, B) over occupied B bins within a
 * Chebyshev radius r, discounted by 1 / (1 + Manhattan distance).
 */
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rio/kdtree.hpp"
#include "rio/preprocess.hpp"
#include "rio/types.hpp"

namespace rio {

struct HistogramConfig {
  double distance_bin_width = 0.2;  // m
  double rcs_bin_width = 1.0;       // dBsm
  int distance_bins = 100;
  int rcs_bins = 50;
  double rcs_origin = 0.0;  // dBsm value at the lower edge of RCS bin 0
  int neighbors = 30;

  bool operator==(const HistogramConfig &) const = default;
};

class LgcHistogram {
 public:
  struct Bin {
    int distance;
    int rcs;
    int count;
  };

  LgcHistogram() = default;
  explicit LgcHistogram(const HistogramConfig &config);

  const HistogramConfig &config() const { return config_; }
  int count(int distance_bin, int rcs_bin) const;
  /// Adds one neighbour; out-of-range values are clamped to the edge bins.
  void add(double distance, double rcs);

  int total() const { return total_; }
  int clamped() const { return clamped_; }
  bool empty() const { return total_ == 0; }
  /// Occupied bins in row-major (distance, rcs) order.
  std::vector<Bin> nonzero() const;

  std::size_t owner = 0;   // index of the described keypoint
  double owner_rcs = 0.0;  // dBsm
  /// No neighbours were available when the histogram was built.
  bool no_neighbors = false;

 private:
  HistogramConfig config_;
  std::vector<std::uint16_t> bins_;
  int total_ = 0;
  int clamped_ = 0;
};

struct KeypointCloud {
  double timestamp = 0.0;
  std::vector<std::size_t> indices;  // into the source scan, ascending
  std::vector<Vec3> positions;       // radar frame
  std::vector<double> rcs;
  std::vector<LgcHistogram> histograms;

  std::size_t size() const { return indices.size(); }
};

/// The K highest-RCS points of each grid cell (ties to the lower index).
/// Throws EmptyScan for an empty scan and InvalidArgument for K < 1.
KeypointCloud extract_keypoints(const RadarScan &scan, const IntervalGrid &grid, int K);

/// Histogram of keypoint `i` from its nearest neighbours in `cloud`.
/// `tree` must be built over cloud.positions.
LgcHistogram build_histogram(const KeypointCloud &cloud, const KdTree &tree, std::size_t i,
                             const HistogramConfig &config);
LgcHistogram build_histogram(const KeypointCloud &cloud, std::size_t i,
                             const HistogramConfig &config);

/// Fills cloud.histograms for every keypoint.
void build_histograms(KeypointCloud &cloud, const HistogramConfig &config);

/// Throws BinConfigMismatch when the histograms use different binning.
double nhi_similarity(const LgcHistogram &a, const LgcHistogram &b, int radius = 1);

struct Correspondence {
  std::size_t index_a = 0;  // keypoint index in cloud a
  std::size_t index_b = 0;  // keypoint index in cloud b
  double similarity = 0.0;
  bool inlier = false;
};

struct MatchConfig {
  double rcs_screen = 3.0;  // dBsm
  double nhi_threshold = 5.0;
  int nhi_radius = 1;
};

/// Mutual-best NHI matches between two described keypoint clouds, ordered by
/// index_a. Candidates must differ in RCS by at most rcs_screen.
std::vector<Correspondence> match_keypoints(const KeypointCloud &a, const KeypointCloud &b,
                                            const MatchConfig &config);

struct RansacConfig {
  double inlier_distance = 0.5;  // m
  int iterations = 200;
};

struct RansacResult {
  std::vector<Correspondence> inliers;
  Pose transform;         // maps cloud a coordinates into cloud b
  bool verified = false;  // false when fewer than 3 matches were given
};

/// Largest consensus set under a rigid transform estimated from 3-point
/// samples. With fewer than 3 matches the input is returned unverified.
RansacResult ransac_filter(const std::vector<Correspondence> &matches, const KeypointCloud &a,
                           const KeypointCloud &b, const RansacConfig &config,
                           std::mt19937_64 &rng);

}  // namespace rio
