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
 * \file io.cpp
 */
#include "rio/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rio/errors.hpp"

namespace rio {

namespace {

constexpr std::string_view kRadarHeader = "timestamp,x,y,z,doppler,rcs";
constexpr std::string_view kImuHeader = "timestamp,wx,wy,wz,ax,ay,az";
constexpr std::string_view kStateHeader =
    "timestamp,px,py,pz,vx,vy,vz,qx,qy,qz,qw,bax,bay,baz,bgx,bgy,bgz";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

struct Line {
  std::size_t number;
  std::string_view text;
};

/// Non-blank lines with their 1-based numbers.
std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t eol = text.find('\n');
    const std::string_view line = trim(text.substr(0, eol));
    if (!line.empty()) lines.push_back({number, line});
    if (eol == std::string_view::npos) break;
    text.remove_prefix(eol + 1);
  }
  return lines;
}

double parse_number(std::string_view field, const std::string &source, std::size_t line,
                    const char *name) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
    throw ParseError(source, line,
                     std::string("field '") + name + "' is not a number: '" + std::string(field) +
                         "'");
  if (!std::isfinite(value))
    throw ParseError(source, line, std::string("field '") + name + "' is not finite");
  return value;
}

/// Parses one delimited row into exactly names.size() numbers.
std::vector<double> parse_row(const Line &line, char delim, const std::vector<const char *> &names,
                              const std::string &source) {
  std::vector<std::string_view> fields;
  std::string_view rest = line.text;
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < rest.size()) {
      while (i < rest.size() && (rest[i] == ' ' || rest[i] == '\t')) ++i;
      std::size_t j = i;
      while (j < rest.size() && rest[j] != ' ' && rest[j] != '\t') ++j;
      if (j > i) fields.push_back(rest.substr(i, j - i));
      i = j;
    }
  } else {
    while (true) {
      const std::size_t p = rest.find(delim);
      fields.push_back(rest.substr(0, p));
      if (p == std::string_view::npos) break;
      rest.remove_prefix(p + 1);
    }
  }
  if (fields.size() != names.size())
    throw ParseError(source, line.number,
                     "expected " + std::to_string(names.size()) + " fields, found " +
                         std::to_string(fields.size()));
  std::vector<double> out(names.size());
  for (std::size_t i = 0; i < names.size(); ++i)
    out[i] = parse_number(fields[i], source, line.number, names[i]);
  return out;
}

std::vector<Line> data_lines(const std::string &text, std::string_view header,
                             const std::string &source) {
  std::vector<Line> lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, source + ": file is empty");
  if (lines.front().text != header)
    throw ParseError(source, lines.front().number,
                     "expected header '" + std::string(header) + "'");
  lines.erase(lines.begin());
  if (lines.empty()) throw Error(ErrorCode::EmptyFile, source + ": file has no data rows");
  return lines;
}

[[noreturn]] void non_monotonic(const std::string &source, std::size_t prev_line,
                                std::size_t line) {
  throw ParseError(ErrorCode::NonMonotonicTimestamps, source, line,
                   "timestamp at line " + std::to_string(line) + " precedes line " +
                       std::to_string(prev_line));
}

void append(std::string &out, double v) { out += format_double(v); }

void append_row(std::string &out, std::initializer_list<double> values, char delim) {
  bool first = true;
  for (double v : values) {
    if (!first) out.push_back(delim);
    first = false;
    append(out, v);
  }
  out.push_back('\n');
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::InvalidArgument, "cannot rename onto " + path + ": " + ec.message());
  }
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Radar

std::vector<RadarScan> parse_radar_csv(const std::string &text, const std::string &source) {
  const std::vector<const char *> names = {"timestamp", "x", "y", "z", "doppler", "rcs"};
  std::vector<RadarScan> scans;
  std::size_t prev_line = 0;
  for (const Line &line : data_lines(text, kRadarHeader, source)) {
    const auto v = parse_row(line, ',', names, source);
    if (!scans.empty()) {
      if (v[0] < scans.back().timestamp) non_monotonic(source, prev_line, line.number);
    }
    if (scans.empty() || v[0] != scans.back().timestamp) {
      scans.emplace_back();
      scans.back().timestamp = v[0];
    }
    scans.back().points.push_back(RadarPoint::make(Vec3(v[1], v[2], v[3]), v[4], v[5]));
    prev_line = line.number;
  }
  return scans;
}

std::vector<RadarScan> load_radar_csv(const std::string &path) {
  return parse_radar_csv(read_file(path), path);
}

std::string format_radar_csv(const std::vector<RadarScan> &scans) {
  std::string out(kRadarHeader);
  out.push_back('\n');
  for (const auto &s : scans)
    for (const auto &p : s.points)
      append_row(out, {s.timestamp, p.position.x(), p.position.y(), p.position.z(), p.doppler,
                       p.rcs},
                 ',');
  return out;
}

void save_radar_csv(const std::string &path, const std::vector<RadarScan> &scans) {
  write_file_atomic(path, format_radar_csv(scans));
}

// ---------------------------------------------------------------------------
// IMU

std::vector<ImuSample> parse_imu_csv(const std::string &text, const std::string &source) {
  const std::vector<const char *> names = {"timestamp", "wx", "wy", "wz", "ax", "ay", "az"};
  std::vector<ImuSample> out;
  std::size_t prev_line = 0;
  for (const Line &line : data_lines(text, kImuHeader, source)) {
    const auto v = parse_row(line, ',', names, source);
    if (!out.empty() && !(v[0] > out.back().timestamp))
      non_monotonic(source, prev_line, line.number);
    ImuSample s;
    s.timestamp = v[0];
    s.angular_velocity = Vec3(v[1], v[2], v[3]);
    s.linear_acceleration = Vec3(v[4], v[5], v[6]);
    out.push_back(s);
    prev_line = line.number;
  }
  return out;
}

std::vector<ImuSample> load_imu_csv(const std::string &path) {
  return parse_imu_csv(read_file(path), path);
}

std::string format_imu_csv(const std::vector<ImuSample> &samples) {
  std::string out(kImuHeader);
  out.push_back('\n');
  for (const auto &s : samples)
    append_row(out, {s.timestamp, s.angular_velocity.x(), s.angular_velocity.y(),
                     s.angular_velocity.z(), s.linear_acceleration.x(),
                     s.linear_acceleration.y(), s.linear_acceleration.z()},
               ',');
  return out;
}

void save_imu_csv(const std::string &path, const std::vector<ImuSample> &samples) {
  write_file_atomic(path, format_imu_csv(samples));
}

// ---------------------------------------------------------------------------
// States

std::vector<NavState> load_state_csv(const std::string &path) {
  const std::vector<const char *> names = {"timestamp", "px", "py", "pz", "vx", "vy",
                                           "vz", "qx", "qy", "qz", "qw", "bax",
                                           "bay", "baz", "bgx", "bgy", "bgz"};
  const std::string text = read_file(path);  // the lines view into it
  std::vector<NavState> out;
  for (const Line &line : data_lines(text, kStateHeader, path)) {
    const auto v = parse_row(line, ',', names, path);
    NavState s;
    s.timestamp = v[0];
    s.position = Vec3(v[1], v[2], v[3]);
    s.velocity = Vec3(v[4], v[5], v[6]);
    const double n = std::sqrt(v[7] * v[7] + v[8] * v[8] + v[9] * v[9] + v[10] * v[10]);
    if (std::abs(n - 1.0) > 1e-6) throw ParseError(path, line.number, "quaternion is not unit-norm");
    s.rotation = UnitQuaternion(v[10], v[7], v[8], v[9]);
    s.bias.accel = Vec3(v[11], v[12], v[13]);
    s.bias.gyro = Vec3(v[14], v[15], v[16]);
    out.push_back(s);
  }
  return out;
}

std::string format_state_csv(const std::vector<NavState> &states) {
  std::string out(kStateHeader);
  out.push_back('\n');
  for (const auto &s : states) {
    const auto &q = s.rotation;
    append_row(out, {s.timestamp, s.position.x(), s.position.y(), s.position.z(),
                     s.velocity.x(), s.velocity.y(), s.velocity.z(), q.x(), q.y(), q.z(), q.w(),
                     s.bias.accel.x(), s.bias.accel.y(), s.bias.accel.z(), s.bias.gyro.x(),
                     s.bias.gyro.y(), s.bias.gyro.z()},
               ',');
  }
  return out;
}

void save_state_csv(const std::string &path, const std::vector<NavState> &states) {
  write_file_atomic(path, format_state_csv(states));
}

// ---------------------------------------------------------------------------
// TUM trajectories

std::vector<StampedPose> parse_tum(const std::string &text, const std::string &source) {
  const std::vector<const char *> names = {"timestamp", "tx", "ty", "tz", "qx", "qy", "qz", "qw"};
  std::vector<StampedPose> out;
  std::size_t prev_line = 0;
  for (const Line &line : split_lines(text)) {
    if (line.text.front() == '#') continue;
    const auto v = parse_row(line, ' ', names, source);
    if (!out.empty() && !(v[0] > out.back().timestamp))
      non_monotonic(source, prev_line, line.number);
    const double n = std::sqrt(v[4] * v[4] + v[5] * v[5] + v[6] * v[6] + v[7] * v[7]);
    if (std::abs(n - 1.0) > 1e-6)
      throw ParseError(source, line.number, "quaternion is not unit-norm");
    StampedPose p;
    p.timestamp = v[0];
    p.pose.translation = Vec3(v[1], v[2], v[3]);
    p.pose.rotation = UnitQuaternion(v[7], v[4], v[5], v[6]);
    out.push_back(p);
    prev_line = line.number;
  }
  if (out.empty()) throw Error(ErrorCode::EmptyFile, source + ": no poses");
  return out;
}

std::vector<StampedPose> load_tum(const std::string &path) {
  return parse_tum(read_file(path), path);
}

std::string format_tum(const std::vector<StampedPose> &poses) {
  std::string out = "# timestamp tx ty tz qx qy qz qw\n";
  for (const auto &p : poses) {
    const auto &q = p.pose.rotation;
    const Vec3 &t = p.pose.translation;
    append_row(out, {p.timestamp, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w()}, ' ');
  }
  return out;
}

void save_tum(const std::string &path, const std::vector<StampedPose> &poses) {
  write_file_atomic(path, format_tum(poses));
}

}  // namespace rio
