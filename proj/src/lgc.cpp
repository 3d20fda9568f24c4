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
 * \file lgc.cpp
 */
#include "rio/lgc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rio/errors.hpp"

namespace rio {

LgcHistogram::LgcHistogram(const HistogramConfig &config)
    : config_(config),
      bins_(static_cast<std::size_t>(config.distance_bins) *
                static_cast<std::size_t>(config.rcs_bins),
            0) {}

int LgcHistogram::count(int distance_bin, int rcs_bin) const {
  if (distance_bin < 0 || distance_bin >= config_.distance_bins || rcs_bin < 0 ||
      rcs_bin >= config_.rcs_bins)
    return 0;
  return bins_[static_cast<std::size_t>(distance_bin) *
                   static_cast<std::size_t>(config_.rcs_bins) +
               static_cast<std::size_t>(rcs_bin)];
}

void LgcHistogram::add(double distance, double rcs) {
  auto bin = [this](double value, double width, int n) {
    const double q = std::floor(value / width);
    if (q < 0.0) {
      ++clamped_;
      return 0;
    }
    if (q > n - 1) {
      ++clamped_;
      return n - 1;
    }
    return static_cast<int>(q);
  };
  const int d = bin(distance, config_.distance_bin_width, config_.distance_bins);
  const int r = bin(rcs - config_.rcs_origin, config_.rcs_bin_width, config_.rcs_bins);
  ++bins_[static_cast<std::size_t>(d) * static_cast<std::size_t>(config_.rcs_bins) +
          static_cast<std::size_t>(r)];
  ++total_;
}

std::vector<LgcHistogram::Bin> LgcHistogram::nonzero() const {
  std::vector<Bin> out;
  for (int d = 0; d < config_.distance_bins; ++d)
    for (int r = 0; r < config_.rcs_bins; ++r)
      if (const int c = count(d, r); c > 0) out.push_back({d, r, c});
  return out;
}

KeypointCloud extract_keypoints(const RadarScan &scan, const IntervalGrid &grid, int K) {
  if (scan.empty()) throw Error(ErrorCode::EmptyScan, "no points to extract keypoints from");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
  if (grid.assignment.size() != scan.size())
    throw Error(ErrorCode::InvalidArgument, "grid does not belong to this scan");

  std::map<int, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < scan.size(); ++i)
    cells[grid.cell_id(grid.assignment[i])].push_back(i);

  std::vector<std::size_t> selected;
  for (auto &[cell, members] : cells) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      const double ra = scan.points[a].rcs, rb = scan.points[b].rcs;
      return ra > rb || (ra == rb && a < b);
    });
    const std::size_t keep = std::min(members.size(), static_cast<std::size_t>(K));
    selected.insert(selected.end(), members.begin(),
                    members.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  std::sort(selected.begin(), selected.end());

  KeypointCloud cloud;
  cloud.timestamp = scan.timestamp;
  cloud.indices = selected;
  for (std::size_t i : selected) {
    cloud.positions.push_back(scan.points[i].position);
    cloud.rcs.push_back(scan.points[i].rcs);
  }
  return cloud;
}

LgcHistogram build_histogram(const KeypointCloud &cloud, const KdTree &tree, std::size_t i,
                             const HistogramConfig &config) {
  LgcHistogram h(config);
  h.owner = i;
  h.owner_rcs = cloud.rcs[i];
  const auto nn = tree.knn(cloud.positions[i], static_cast<std::size_t>(config.neighbors), i);
  for (const auto &n : nn) h.add(std::sqrt(n.sq_dist), cloud.rcs[n.index]);
  h.no_neighbors = nn.empty();
  return h;
}

LgcHistogram build_histogram(const KeypointCloud &cloud, std::size_t i,
                             const HistogramConfig &config) {
  const KdTree tree(cloud.positions);
  return build_histogram(cloud, tree, i, config);
}

void build_histograms(KeypointCloud &cloud, const HistogramConfig &config) {
  const KdTree tree(cloud.positions);
  cloud.histograms.clear();
  cloud.histograms.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i)
    cloud.histograms.push_back(build_histogram(cloud, tree, i, config));
}

namespace {

double nhi_with_bins(const std::vector<LgcHistogram::Bin> &a_bins, const LgcHistogram &b,
                     int radius) {
  double total = 0.0;
  for (const auto &bin : a_bins) {
    double best = 0.0;
    for (int x = bin.distance - radius; x <= bin.distance + radius; ++x) {
      for (int y = bin.rcs - radius; y <= bin.rcs + radius; ++y) {
        const int cb = b.count(x, y);
        if (cb == 0) continue;
        const double w = 1.0 / (1.0 + std::abs(x - bin.distance) + std::abs(y - bin.rcs));
        best = std::max(best, std::min(bin.count, cb) * w);
      }
    }
    total += best;
  }
  return total;
}

void check_same_binning(const LgcHistogram &a, const LgcHistogram &b) {
  const auto &ca = a.config();
  const auto &cb = b.config();
  if (ca.distance_bins != cb.distance_bins || ca.rcs_bins != cb.rcs_bins ||
      ca.distance_bin_width != cb.distance_bin_width || ca.rcs_bin_width != cb.rcs_bin_width ||
      ca.rcs_origin != cb.rcs_origin)
    throw Error(ErrorCode::BinConfigMismatch, "histograms use different binning");
}

}  // namespace

double nhi_similarity(const LgcHistogram &a, const LgcHistogram &b, int radius) {
  check_same_binning(a, b);
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "NHI radius must be >= 0");
  return nhi_with_bins(a.nonzero(), b, radius);
}

std::vector<Correspondence> match_keypoints(const KeypointCloud &a, const KeypointCloud &b,
                                            const MatchConfig &config) {
  std::vector<Correspondence> out;
  if (a.size() == 0 || b.size() == 0) return out;
  if (a.histograms.size() != a.size() || b.histograms.size() != b.size())
    throw Error(ErrorCode::InvalidArgument, "keypoint clouds need histograms");
  check_same_binning(a.histograms.front(), b.histograms.front());

  // b sorted by RCS for the pre-screen range query
  std::vector<std::size_t> by_rcs(b.size());
  std::iota(by_rcs.begin(), by_rcs.end(), std::size_t{0});
  std::stable_sort(by_rcs.begin(), by_rcs.end(),
                   [&](std::size_t x, std::size_t y) { return b.rcs[x] < b.rcs[y]; });

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> best_b(a.size(), kNone);
  std::vector<double> best_b_score(a.size(), -1.0);
  std::vector<std::size_t> best_a(b.size(), kNone);
  std::vector<double> best_a_score(b.size(), -1.0);

  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto a_bins = a.histograms[i].nonzero();
    const double lo = a.rcs[i] - config.rcs_screen;
    const double hi = a.rcs[i] + config.rcs_screen;
    auto it = std::lower_bound(by_rcs.begin(), by_rcs.end(), lo,
                               [&](std::size_t x, double v) { return b.rcs[x] < v; });
    for (; it != by_rcs.end() && b.rcs[*it] <= hi; ++it) {
      const std::size_t j = *it;
      const double s = nhi_with_bins(a_bins, b.histograms[j], config.nhi_radius);
      if (s > best_b_score[i] || (s == best_b_score[i] && j < best_b[i])) {
        best_b_score[i] = s;
        best_b[i] = j;
      }
      if (s > best_a_score[j] || (s == best_a_score[j] && i < best_a[j])) {
        best_a_score[j] = s;
        best_a[j] = i;
      }
    }
  }

  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t j = best_b[i];
    if (j == kNone || best_a[j] != i) continue;
    if (best_b_score[i] < config.nhi_threshold) continue;
    out.push_back({i, j, best_b_score[i], false});
  }
  return out;
}

RansacResult ransac_filter(const std::vector<Correspondence> &matches, const KeypointCloud &a,
                           const KeypointCloud &b, const RansacConfig &config,
                           std::mt19937_64 &rng) {
  RansacResult result;
  if (matches.size() < 3) {
    result.inliers = matches;
    return result;
  }
  result.verified = true;

  auto consensus = [&](const Pose &T, std::vector<char> &flags) {
    std::size_t n = 0;
    const double d2 = config.inlier_distance * config.inlier_distance;
    for (std::size_t m = 0; m < matches.size(); ++m) {
      const Vec3 pa = T * a.positions[matches[m].index_a];
      flags[m] = (pa - b.positions[matches[m].index_b]).squaredNorm() < d2;
      n += static_cast<std::size_t>(flags[m]);
    }
    return n;
  };
  auto fit = [&](const std::vector<std::size_t> &ids) {
    std::vector<Vec3> pa, pb;
    for (std::size_t m : ids) {
      pa.push_back(a.positions[matches[m].index_a]);
      pb.push_back(b.positions[matches[m].index_b]);
    }
    return geom::umeyama_align(pb, pa);
  };

  std::uniform_int_distribution<std::size_t> pick(0, matches.size() - 1);
  std::vector<char> flags(matches.size()), best_flags(matches.size(), 0);
  std::size_t best = 0;
  Pose best_T;
  for (int it = 0; it < config.iterations; ++it) {
    std::vector<std::size_t> sample;
    bool ok = false;
    for (int attempt = 0; attempt < 16 && !ok; ++attempt) {
      const std::size_t i0 = pick(rng), i1 = pick(rng), i2 = pick(rng);
      if (i0 == i1 || i1 == i2 || i0 == i2) continue;
      const Vec3 &p0 = a.positions[matches[i0].index_a];
      const Vec3 &p1 = a.positions[matches[i1].index_a];
      const Vec3 &p2 = a.positions[matches[i2].index_a];
      if ((p1 - p0).cross(p2 - p0).norm() < 1e-6) continue;  // collinear
      sample = {i0, i1, i2};
      ok = true;
    }
    if (!ok) continue;
    Pose T;
    try {
      T = fit(sample);
    } catch (const Error &) {
      continue;
    }
    const std::size_t n = consensus(T, flags);
    if (n > best) {
      best = n;
      best_flags = flags;
      best_T = T;
    }
  }

  if (best >= 3) {
    std::vector<std::size_t> ids;
    for (std::size_t m = 0; m < matches.size(); ++m)
      if (best_flags[m]) ids.push_back(m);
    try {
      const Pose T = fit(ids);
      if (consensus(T, flags) >= best) {
        best_flags = flags;
        best_T = T;
      }
    } catch (const Error &) {
    }
  }

  result.transform = best_T;
  for (std::size_t m = 0; m < matches.size(); ++m) {
    if (!best_flags[m]) continue;
    Correspondence c = matches[m];
    c.inlier = true;
    result.inliers.push_back(c);
  }
  return result;
}

}  // namespace rio
