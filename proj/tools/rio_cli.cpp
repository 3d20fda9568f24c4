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
 * \file rio_cli.cpp
 * \brief Command-line front end: simulate, run, eval, ablate.
 *
 * Exit codes: 0 success, 1 usage, 2 data error, 3 solver failure.
 */
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "rio/config.hpp"
#include "rio/errors.hpp"
#include "rio/io.hpp"
#include "rio/pipeline.hpp"
#include "rio/sim.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitSolver = 3;

struct DataPaths {
  std::string dir;
  std::string radar;
  std::string imu;
  std::string initial_state;
  std::string reference;

  void resolve() {
    auto in_dir = [this](std::string &p, const char *name) {
      if (p.empty() && !dir.empty()) p = (fs::path(dir) / name).string();
    };
    in_dir(radar, "radar.csv");
    in_dir(imu, "imu.csv");
    if (initial_state.empty() && !dir.empty() && fs::exists(fs::path(dir) / "initial_state.csv"))
      initial_state = (fs::path(dir) / "initial_state.csv").string();
    if (reference.empty() && !dir.empty() && fs::exists(fs::path(dir) / "ground_truth.txt"))
      reference = (fs::path(dir) / "ground_truth.txt").string();
  }
};

json costs_json(const rio::FamilyCosts &c) {
  return {{"imu", c.imu}, {"doppler", c.doppler}, {"p2p", c.p2p}, {"total", c.total()}};
}

json diagnostics_json(const rio::RunConfig &config, const rio::PipelineResult &r) {
  json frames = json::array();
  for (const auto &f : r.frames) {
    frames.push_back({{"index", f.index},
                      {"timestamp", f.timestamp},
                      {"input_points", f.input_points},
                      {"outlier_points", f.outlier_points},
                      {"static_points", f.static_points},
                      {"dynamic_points", f.dynamic_points},
                      {"keypoints", f.keypoints},
                      {"matches", f.matches},
                      {"inliers", f.inliers},
                      {"landmarks", f.landmarks},
                      {"p2p_blocks", f.p2p_blocks},
                      {"iterations", f.iterations},
                      {"costs", costs_json(f.costs)},
                      {"converged", f.converged},
                      {"diverged", f.diverged},
                      {"degraded", f.degraded},
                      {"notes", f.notes}});
  }
  return {{"mode", rio::to_string(config.mode)},
          {"seed", config.seed},
          {"frames_processed", r.frames.size()},
          {"diverged_frames", r.diverged_frames},
          {"degraded_frames", r.degraded_frames},
          {"runtime_seconds", r.runtime_seconds},
          {"config", rio::format_config(config)},
          {"frames", frames}};
}

rio::RunConfig make_config(const std::string &path, const std::string &mode,
                           std::optional<std::uint64_t> seed) {
  rio::RunConfig config = path.empty() ? rio::RunConfig{} : rio::load_config(path);
  if (!mode.empty()) {
    const auto m = rio::parse_mode(mode);
    if (!m) throw rio::Error(rio::ErrorCode::InvalidArgument, "unknown mode '" + mode + "'");
    config.mode = *m;
  }
  if (seed) config.seed = *seed;
  return config;
}

std::optional<rio::NavState> load_initial(const std::string &path) {
  if (path.empty()) return std::nullopt;
  const auto states = rio::load_state_csv(path);
  return states.front();
}

int cmd_simulate(const std::string &preset_name, const std::string &out, std::uint64_t seed,
                 bool noisy) {
  const rio::sim::Preset preset = rio::sim::make_preset(preset_name, noisy, seed);
  const rio::sim::Dataset data = rio::sim::generate(preset, seed);
  fs::create_directories(out);
  rio::save_radar_csv((fs::path(out) / "radar.csv").string(), data.scans);
  rio::save_imu_csv((fs::path(out) / "imu.csv").string(), data.imu);
  std::vector<rio::StampedPose> gt;
  for (const auto &s : data.ground_truth) gt.push_back({s.timestamp, s.pose()});
  rio::save_tum((fs::path(out) / "ground_truth.txt").string(), gt);
  rio::save_state_csv((fs::path(out) / "initial_state.csv").string(), {data.ground_truth.front()});
  std::cout << "wrote " << data.scans.size() << " scans and " << data.imu.size()
            << " IMU samples to " << out << "\n";
  return kExitOk;
}

int cmd_run(DataPaths paths, const std::string &config_path, const std::string &mode,
            std::optional<std::uint64_t> seed, const std::string &out) {
  paths.resolve();
  if (paths.radar.empty() || paths.imu.empty()) {
    std::cerr << "run: need --data or both --radar and --imu\n";
    return kExitUsage;
  }
  const rio::RunConfig config = make_config(config_path, mode, seed);
  const auto radar = rio::load_radar_csv(paths.radar);
  const auto imu = rio::load_imu_csv(paths.imu);
  const auto result = rio::run_pipeline(config, radar, imu, load_initial(paths.initial_state));

  fs::create_directories(out);
  rio::save_tum((fs::path(out) / "trajectory.txt").string(), result.trajectory);
  json diag = diagnostics_json(config, result);
  if (!paths.reference.empty()) {
    const auto ate = rio::evaluate_ate(result.trajectory, rio::load_tum(paths.reference));
    diag["ate_rmse"] = ate.rmse;
    std::cout << "ATE RMSE " << ate.rmse << " m\n";
  }
  rio::write_file_atomic((fs::path(out) / "diagnostics.json").string(), diag.dump(2) + "\n");
  std::cout << "processed " << result.frames.size() << " frames in " << result.runtime_seconds
            << " s (" << result.degraded_frames << " degraded, " << result.diverged_frames
            << " diverged)\n";
  return result.diverged_frames > 0 ? kExitSolver : kExitOk;
}

int cmd_eval(const std::string &est, const std::string &ref, double tolerance,
             const std::string &out) {
  const auto ate = rio::evaluate_ate(rio::load_tum(est), rio::load_tum(ref), tolerance);
  double max_error = 0.0;
  for (double e : ate.errors) max_error = std::max(max_error, e);
  std::cout << "poses " << ate.errors.size() << "\nrmse " << ate.rmse << "\nmax " << max_error
            << "\n";
  if (!out.empty()) {
    json j = {{"rmse", ate.rmse},
              {"max", max_error},
              {"poses", ate.errors.size()},
              {"timestamps", ate.timestamps},
              {"errors", ate.errors}};
    rio::write_file_atomic(out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_ablate(DataPaths paths, const std::string &config_path, std::optional<std::uint64_t> seed,
               const std::string &out) {
  paths.resolve();
  if (paths.radar.empty() || paths.imu.empty() || paths.reference.empty()) {
    std::cerr << "ablate: need --data (or --radar, --imu and --ref)\n";
    return kExitUsage;
  }
  const auto radar = rio::load_radar_csv(paths.radar);
  const auto imu = rio::load_imu_csv(paths.imu);
  const auto reference = rio::load_tum(paths.reference);
  const auto initial = load_initial(paths.initial_state);

  fs::create_directories(out);
  std::string csv = "mode,ate_rmse,degraded_frames,diverged_frames,runtime_seconds\n";
  json table = json::array();
  bool failed = false;
  std::cout << "mode       ATE RMSE [m]   degraded  diverged\n";
  for (const rio::Mode mode : {rio::Mode::DopplerImu, rio::Mode::WeightedDopplerImu,
                               rio::Mode::P2PImu, rio::Mode::Full}) {
    rio::RunConfig config = make_config(config_path, "", seed);
    config.mode = mode;
    const auto result = rio::run_pipeline(config, radar, imu, initial);
    const double rmse = rio::evaluate_ate(result.trajectory, reference).rmse;
    failed = failed || result.diverged_frames > 0;
    const std::string name = rio::to_string(mode);
    rio::save_tum((fs::path(out) / ("trajectory_" + name + ".txt")).string(), result.trajectory);
    csv += name + "," + rio::format_double(rmse) + "," + std::to_string(result.degraded_frames) +
           "," + std::to_string(result.diverged_frames) + "," +
           rio::format_double(result.runtime_seconds) + "\n";
    table.push_back({{"mode", name},
                     {"ate_rmse", rmse},
                     {"degraded_frames", result.degraded_frames},
                     {"diverged_frames", result.diverged_frames}});
    std::printf("%-10s %12.6f %10zu %9zu\n", name.c_str(), rmse, result.degraded_frames,
                result.diverged_frames);
  }
  rio::write_file_atomic((fs::path(out) / "ablation.csv").string(), csv);
  rio::write_file_atomic((fs::path(out) / "ablation.json").string(), table.dump(2) + "\n");
  return failed ? kExitSolver : kExitOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Radar-inertial odometry with weighted Doppler and histogram matching"};
  app.require_subcommand(1);

  std::string preset = "circle60", out, config_path, mode, est, ref, json_out;
  std::uint64_t seed_value = 0;
  std::optional<std::uint64_t> seed;
  bool noisy = false;
  double tolerance = 0.01;
  DataPaths paths;

  auto *sim = app.add_subcommand("simulate", "Generate a synthetic dataset from a preset");
  sim->add_option("--preset", preset, "circle60 | aniso | sparse | twist")->capture_default_str();
  sim->add_option("--out,-o", out, "Output directory")->required();
  sim->add_option("--seed", seed_value, "Random seed")->capture_default_str();
  sim->add_flag("--noisy", noisy, "Enable sensor noise and IMU bias");

  auto add_data = [&](CLI::App *sub) {
    sub->add_option("--data,-d", paths.dir,
                    "Dataset directory (radar.csv, imu.csv, optional initial_state.csv and "
                    "ground_truth.txt)");
    sub->add_option("--radar", paths.radar, "Radar CSV");
    sub->add_option("--imu", paths.imu, "IMU CSV");
    sub->add_option("--initial-state", paths.initial_state, "Initial state CSV");
    sub->add_option("--ref", paths.reference, "Reference trajectory (TUM)");
    sub->add_option("--config,-c", config_path, "Config file (key = value)");
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_option("--out,-o", out, "Output directory")->required();
  };
  auto *run = app.add_subcommand("run", "Run the odometry on a dataset");
  add_data(run);
  run->add_option("--mode,-m", mode, "D-IMU | WD-IMU | P2P-IMU | Full");

  auto *eval = app.add_subcommand("eval", "ATE RMSE of an estimate against a reference");
  eval->add_option("--est", est, "Estimated trajectory (TUM)")->required();
  eval->add_option("--ref", ref, "Reference trajectory (TUM)")->required();
  eval->add_option("--tolerance", tolerance, "Association tolerance [s]")->capture_default_str();
  eval->add_option("--json", json_out, "Write metrics as JSON");

  auto *ablate = app.add_subcommand("ablate", "Run all four modes and compare ATE");
  add_data(ablate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(preset, out, seed_value, noisy);
    if (*run) return cmd_run(paths, config_path, mode, seed, out);
    if (*eval) return cmd_eval(est, ref, tolerance, json_out);
    if (*ablate) return cmd_ablate(paths, config_path, seed, out);
  } catch (const rio::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == rio::ErrorCode::SolverDiverged ? kExitSolver : kExitData;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
