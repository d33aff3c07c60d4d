// Copyright 2026 The phaseq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Experiment configuration and the subcommands behind the command-line tool.
//
// A config is one JSON object with the blocks device, pulses, integrator,
// noise, ape, leakage, calibrate, tomography and sweep. Every block and key is
// optional; unknown keys are rejected. Outputs go to one directory per run
// and every file carries the tool version and the config hash.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "phaseq/calibration.hpp"
#include "phaseq/pulse.hpp"
#include "phaseq/qudit.hpp"
#include "phaseq/tomography.hpp"

namespace phaseq {

struct PulseBlock {
  double fwhm = 6.0;
  ShapingProtocol protocol = ShapingProtocol::half_derivative();
};

struct NoiseBlock {
  bool enabled = false;
  int shots = 1000;
};

struct ApeBlock {
  Transition transition = Transition::k01;
  std::vector<int> n_list{0, 1, 3, 5};
  int phi_points = 64;
  std::vector<ShapingProtocol> protocols{ShapingProtocol::gaussian_only(), ShapingProtocol::half_derivative()};
  double visibility_floor = 0.05;
  std::optional<double> visibility_decay;
};

struct LeakageBlock {
  std::vector<double> fwhm_list{3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> delays;  // defaults to default_filter_delays()
  /// Also write the state trajectory of the calibrated pi pulse at
  /// pulses.fwhm for each protocol.
  bool trajectories = false;
};

struct CalibrateBlock {
  double injected_detuning = 0.0;
  double track_t_max = 400.0;
  double track_t_step = 1.0;
  double axis_advance = 0.050;
  std::vector<double> f21_offsets{-0.195, -0.190};
  double f21_t_max = 500.0;
  double f21_t_step = 2.0;
  double f21_prep_fwhm = 4.0;
  double z_t_fixed = 24.0;
  double z_fwhm = 6.0;
  std::vector<double> z_amp_grid;  // defaults to 81 points on [0, 0.4] GHz
  std::array<double, 2> beta_bracket{0.0, 1.5};
};

struct TomographyBlock {
  int theta_points = 21;
  int s_points = 41;
  PreRotationMode mode = PreRotationMode::Ideal;
  bool tune_hadamard = true;
};

struct SweepBlock {
  /// Dotted path of a numeric config entry, e.g. "pulses.beta".
  std::string path;
  std::vector<double> values;
  std::vector<std::string> outputs{"epsilon_deg"};
  double theta_deg = 90.0;
};

struct ExperimentConfig {
  QuditParams device;
  PulseBlock pulses;
  PropagatorConfig integrator;
  NoiseBlock noise;
  std::uint64_t seed = 0;
  ApeBlock ape;
  LeakageBlock leakage;
  CalibrateBlock calibrate;
  TomographyBlock tomography;
  SweepBlock sweep;
  std::string output_dir = "phaseq-out";
};

/// Strict parse; throws ConfigError on unknown keys, wrong types or values
/// out of range.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Every field, defaults included. parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& c);
/// 16 hex digits of FNV-1a over the canonical dump of to_json(c).
std::string config_hash(const ExperimentConfig& c);

CalibrationRecord load_calibration(const std::filesystem::path& path);

struct RunOptions {
  std::filesystem::path out_dir;
  int workers = 1;
  std::optional<CalibrationRecord> calibration;
};

/// Names accepted by run_command: ape, leakage, calibrate, tomography, sweep.
const std::vector<std::string>& command_names();
/// Help text describing the config blocks a subcommand reads.
std::string command_help(std::string_view name);

/// Runs one subcommand and writes its files under options.out_dir. Returns
/// the summary that was written to summary.json.
nlohmann::json run_command(std::string_view name, const ExperimentConfig& config, const RunOptions& options);

/// Scalar outputs known to the sweep subcommand.
const std::vector<std::string>& sweep_outputs();

}  // namespace phaseq
