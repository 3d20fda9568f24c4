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
 * \file config.cpp
 */
#include "rio/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "rio/errors.hpp"
#include "rio/io.hpp"

namespace rio {

namespace {

constexpr double kDeg = M_PI / 180.0;

/// Thrown by setters; converted to a ParseError with the line number.
struct BadValue {
  std::string message;
};

std::vector<std::string> words(const std::string &value) {
  std::istringstream ss(value);
  std::vector<std::string> out;
  for (std::string w; ss >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string &s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw BadValue{"'" + s + "' is not a number"};
  return v;
}

long long to_int(const std::string &s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw BadValue{"'" + s + "' is not an integer"};
  return v;
}

std::vector<double> to_doubles(const std::string &value, std::size_t n) {
  const auto w = words(value);
  if (w.size() != n) throw BadValue{"expected " + std::to_string(n) + " numbers"};
  std::vector<double> out;
  for (const auto &s : w) out.push_back(to_double(s));
  return out;
}

std::string one_word(const std::string &value) {
  const auto w = words(value);
  if (w.size() != 1) throw BadValue{"expected a single value"};
  return w.front();
}

double positive(double v) {
  if (!(v > 0.0)) throw BadValue{"must be > 0"};
  return v;
}

double non_negative(double v) {
  if (v < 0.0) throw BadValue{"must be >= 0"};
  return v;
}

int at_least(long long v, long long lo) {
  if (v < lo) throw BadValue{"must be >= " + std::to_string(lo)};
  if (v > 1000000) throw BadValue{"is too large"};
  return static_cast<int>(v);
}

struct Key {
  const char *name;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

std::string num(double v) { return format_double(v); }

template <typename F>
Key real(const char *name, F field, double (*check)(double)) {
  return {name,
          [field, check](RunConfig &c, const std::string &v) {
            field(c) = check(to_double(one_word(v)));
          },
          [field](const RunConfig &c) { return num(field(const_cast<RunConfig &>(c))); }};
}

template <typename F>
Key integer(const char *name, F field, long long lo) {
  return {name,
          [field, lo](RunConfig &c, const std::string &v) {
            field(c) = at_least(to_int(one_word(v)), lo);
          },
          [field](const RunConfig &c) {
            return std::to_string(field(const_cast<RunConfig &>(c)));
          }};
}

template <typename F>
Key degrees(const char *name, F field, bool must_be_positive) {
  return {name,
          [field, must_be_positive](RunConfig &c, const std::string &v) {
            const double d = to_double(one_word(v));
            if (must_be_positive) positive(d);
            field(c) = d * kDeg;
          },
          [field](const RunConfig &c) {
            return num(field(const_cast<RunConfig &>(c)) / kDeg);
          }};
}

double any(double v) { return v; }

const std::vector<Key> &keys() {
  static const std::vector<Key> table = {
      {"mode",
       [](RunConfig &c, const std::string &v) {
         const auto m = parse_mode(one_word(v));
         if (!m) throw BadValue{"unknown mode '" + v + "'"};
         c.mode = *m;
       },
       [](const RunConfig &c) { return std::string(to_string(c.mode)); }},
      {"profile", [](RunConfig &c, const std::string &v) { c.apply_profile(one_word(v)); },
       nullptr},
      integer("window_size", [](RunConfig &c) -> int & { return c.estimator.window_size; }, 2),
      real("huber_delta", [](RunConfig &c) -> double & { return c.estimator.huber_delta; },
           positive),
      real("p2p_weight", [](RunConfig &c) -> double & { return c.estimator.p2p_weight; },
           non_negative),
      real("gravity", [](RunConfig &c) -> double & { return c.estimator.gravity; }, positive),
      integer("max_iterations", [](RunConfig &c) -> int & { return c.estimator.max_iterations; },
              1),
      real("initial_damping",
           [](RunConfig &c) -> double & { return c.estimator.initial_damping; }, positive),
      real("cost_tolerance",
           [](RunConfig &c) -> double & { return c.estimator.cost_tolerance; }, non_negative),
      {"weight_pairing",
       [](RunConfig &c, const std::string &v) {
         const std::string w = one_word(v);
         if (w == "azimuth_sin")
           c.estimator.pairing = WeightPairing::AzimuthSin;
         else if (w == "elevation_sin")
           c.estimator.pairing = WeightPairing::ElevationSin;
         else
           throw BadValue{"expected azimuth_sin or elevation_sin"};
       },
       [](const RunConfig &c) {
         return std::string(c.estimator.pairing == WeightPairing::AzimuthSin ? "azimuth_sin"
                                                                            : "elevation_sin");
       }},
      integer("nonkey_min_observations",
              [](RunConfig &c) -> int & { return c.estimator.nonkey_min_observations; }, 0),
      real("nonkey_radius",
           [](RunConfig &c) -> double & { return c.estimator.nonkey_association_radius; },
           positive),
      {"outlier_removal",
       [](RunConfig &c, const std::string &v) {
         const std::string w = one_word(v);
         if (w == "true" || w == "1")
           c.outlier_removal = true;
         else if (w == "false" || w == "0")
           c.outlier_removal = false;
         else
           throw BadValue{"expected true or false"};
       },
       [](const RunConfig &c) { return std::string(c.outlier_removal ? "true" : "false"); }},
      real("outlier_radius", [](RunConfig &c) -> double & { return c.outlier_radius; },
           positive),
      real("dynamic_velocity_threshold",
           [](RunConfig &c) -> double & { return c.dynamic_velocity_threshold; }, positive),
      real("dynamic_ratio_threshold",
           [](RunConfig &c) -> double & { return c.dynamic_ratio_threshold; }, positive),
      integer("keypoints_per_cell", [](RunConfig &c) -> int & { return c.keypoints_per_cell; },
              1),
      degrees("azimuth_start_deg", [](RunConfig &c) -> double & { return c.grid.azimuth_start; },
              false),
      degrees("azimuth_res_deg", [](RunConfig &c) -> double & { return c.grid.azimuth_res; },
              true),
      integer("azimuth_count", [](RunConfig &c) -> int & { return c.grid.azimuth_count; }, 1),
      degrees("elevation_start_deg",
              [](RunConfig &c) -> double & { return c.grid.elevation_start; }, false),
      degrees("elevation_res_deg", [](RunConfig &c) -> double & { return c.grid.elevation_res; },
              true),
      integer("elevation_count", [](RunConfig &c) -> int & { return c.grid.elevation_count; }, 1),
      real("hist_distance_bin_width",
           [](RunConfig &c) -> double & { return c.histogram.distance_bin_width; }, positive),
      real("hist_rcs_bin_width", [](RunConfig &c) -> double & { return c.histogram.rcs_bin_width; },
           positive),
      integer("hist_distance_bins", [](RunConfig &c) -> int & { return c.histogram.distance_bins; },
              1),
      integer("hist_rcs_bins", [](RunConfig &c) -> int & { return c.histogram.rcs_bins; }, 1),
      real("hist_rcs_origin", [](RunConfig &c) -> double & { return c.histogram.rcs_origin; }, any),
      integer("hist_neighbors", [](RunConfig &c) -> int & { return c.histogram.neighbors; }, 1),
      real("rcs_screen", [](RunConfig &c) -> double & { return c.match.rcs_screen; }, non_negative),
      real("nhi_threshold", [](RunConfig &c) -> double & { return c.match.nhi_threshold; },
           non_negative),
      integer("nhi_radius", [](RunConfig &c) -> int & { return c.match.nhi_radius; }, 0),
      real("ransac_inlier_distance",
           [](RunConfig &c) -> double & { return c.ransac.inlier_distance; }, positive),
      integer("ransac_iterations", [](RunConfig &c) -> int & { return c.ransac.iterations; }, 1),
      real("imu_accel_noise", [](RunConfig &c) -> double & { return c.imu_noise.accel_noise_density; },
           positive),
      real("imu_gyro_noise", [](RunConfig &c) -> double & { return c.imu_noise.gyro_noise_density; },
           positive),
      real("imu_accel_walk", [](RunConfig &c) -> double & { return c.imu_noise.accel_random_walk; },
           positive),
      real("imu_gyro_walk", [](RunConfig &c) -> double & { return c.imu_noise.gyro_random_walk; },
           positive),
      {"extrinsic_rotation",
       [](RunConfig &c, const std::string &v) {
         const auto q = to_doubles(v, 4);
         const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
         if (std::abs(n - 1.0) > 1e-6) throw BadValue{"quaternion is not unit-norm"};
         c.extrinsics.radar_to_body = UnitQuaternion(q[3], q[0], q[1], q[2]);
       },
       [](const RunConfig &c) {
         const auto &q = c.extrinsics.radar_to_body;
         return num(q.x()) + " " + num(q.y()) + " " + num(q.z()) + " " + num(q.w());
       }},
      {"extrinsic_translation",
       [](RunConfig &c, const std::string &v) {
         const auto t = to_doubles(v, 3);
         c.extrinsics.translation = Vec3(t[0], t[1], t[2]);
       },
       [](const RunConfig &c) {
         const Vec3 &t = c.extrinsics.translation;
         return num(t.x()) + " " + num(t.y()) + " " + num(t.z());
       }},
      {"seed",
       [](RunConfig &c, const std::string &v) {
         const std::string w = one_word(v);
         std::uint64_t s = 0;
         const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), s);
         if (ec != std::errc() || ptr != w.data() + w.size()) throw BadValue{"bad seed"};
         c.seed = s;
       },
       [](const RunConfig &c) { return std::to_string(c.seed); }},
  };
  return table;
}

std::string trimmed(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::apply_profile(const std::string &name) {
  if (name == "ars548") {
    histogram = HistogramConfig{};
    histogram.distance_bin_width = 0.2;
    histogram.rcs_bin_width = 1.0;
    histogram.distance_bins = 100;
    histogram.rcs_bins = 50;
    histogram.neighbors = 30;
    match.nhi_threshold = 5.0;
  } else if (name == "eagle_g7") {
    histogram = HistogramConfig{};
    histogram.distance_bin_width = 0.1;
    histogram.rcs_bin_width = 0.01;
    histogram.distance_bins = 100;
    histogram.rcs_bins = 100;
    histogram.neighbors = 15;
    match.nhi_threshold = 10.0;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown profile '" + name + "' (ars548 | eagle_g7)");
  }
}

RunConfig parse_config(const std::string &text, const std::string &source) {
  RunConfig config;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const std::string line = trimmed(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(ErrorCode::InvalidConfig, source, number, "expected 'key = value'");
    const std::string key = trimmed(line.substr(0, eq));
    const std::string value = trimmed(line.substr(eq + 1));
    const Key *match = nullptr;
    for (const Key &k : keys())
      if (key == k.name) match = &k;
    if (!match)
      throw ParseError(ErrorCode::InvalidConfig, source, number, "unknown key '" + key + "'");
    try {
      match->set(config, value);
    } catch (const BadValue &e) {
      throw ParseError(ErrorCode::InvalidConfig, source, number, key + ": " + e.message);
    } catch (const Error &e) {
      throw ParseError(ErrorCode::InvalidConfig, source, number, key + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::string &path) { return parse_config(read_file(path), path); }

std::string format_config(const RunConfig &config) {
  std::string out;
  for (const Key &k : keys()) {
    if (!k.get) continue;
    out += k.name;
    out += " = ";
    out += k.get(config);
    out += '\n';
  }
  return out;
}

}  // namespace rio
