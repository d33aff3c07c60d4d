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

// Calibration ladder: pulse amplitude, drive frequency, 1<->2 transition
// frequency, Z-pulse amplitude, and the derivative coefficient that nulls the
// phase error of a pi/2 gate.
//
// Detuning convention: delta_f = f_drive - f10. A drive delta_f off the qubit
// for a time dt accumulates a fringe phase 2 pi delta_f dt (radians).

#include <string>
#include <vector>

#include "json.hpp"

#include "phaseq/fringe.hpp"
#include "phaseq/pulse.hpp"
#include "phaseq/simulator.hpp"

namespace phaseq {

struct AmplitudeCalibration {
  double amplitude = 0.0;
  /// Distance of the measured population from its target at the optimum
  /// (1 - P for pi pulses).
  double residual = 0.0;
};

/// Golden-section search around the area-theorem seed. For |theta| = pi it
/// maximizes the upper-level population starting from the lower level of
/// `transition`; otherwise it targets sin^2(theta/2) and checks the sign of
/// the Bloch y component. Throws FitError when the optimum sits on the
/// bracket edge.
AmplitudeCalibration tune_amplitude(const Simulator& sim, const ShapingProtocol& protocol, double theta,
                                    double fwhm, Transition transition = Transition::k01);

struct FrequencyTrackingOptions {
  /// Rate at which the final pulse axis advances, GHz.
  double axis_advance = 0.050;
  double t_step = 1.0;
  double fwhm = 6.0;
  ShapingProtocol protocol = ShapingProtocol::half_derivative();
  /// Calibrated pi/2 amplitude; the area-theorem value when absent.
  std::optional<double> half_pi_amplitude;
};

struct FrequencyEstimate {
  /// Estimated f_drive - f10, GHz.
  double detuning = 0.0;
  FringeFit fit;
};

/// Ramsey fringe whose final pulse axis advances at options.axis_advance;
/// the device is driven at f10 + detuning_true. Throws InvalidArgument when
/// t_max is shorter than two periods of the axis advance.
FrequencyEstimate track_frequency(const Simulator& sim, double detuning_true, double t_max,
                                  const FrequencyTrackingOptions& options = {});

/// P1(t, phi) with rows indexed by t. The drive sits at f10 + detuning.
std::vector<std::vector<double>> two_d_ramsey(const Simulator& sim, double detuning,
                                              const std::vector<double>& t_grid,
                                              const std::vector<double>& phi_grid,
                                              const FrequencyTrackingOptions& options = {});

/// Least-squares slope of the fringe maximum phi0(t) over a 2-D scan, rad/ns.
double ridge_slope(const std::vector<std::vector<double>>& surface, const std::vector<double>& t_grid,
                   const std::vector<double>& phi_grid);

struct ZCalibrationOptions {
  double t_fixed = 24.0;
  double z_fwhm = 6.0;
  double fwhm = 6.0;
  std::vector<double> amp_grid;  // GHz; defaults to 81 points on [0, 0.4]
  std::optional<double> half_pi_amplitude;
};

struct ZCalibration {
  /// Z amplitude (GHz) whose accumulated phase is pi.
  double z_pi_amplitude = 0.0;
  /// Same quantity from the analytic Gaussian area.
  double analytic = 0.0;
  FringeFit fit;
  std::vector<double> amp_grid;
  std::vector<double> p1;
};

/// Two HD pi/2 pulses t_fixed apart with a Gaussian Z pulse centered between
/// them; P1 oscillates with the Z amplitude. Throws FitError when the pi point
/// lies beyond amp_grid.
ZCalibration calibrate_z(const Simulator& sim, const ZCalibrationOptions& options = {});

/// Z amplitude giving a z phase of `phase` for a truncated Gaussian.
double analytic_z_amplitude(double phase, double z_fwhm);

struct F21Options {
  /// Drive frequencies relative to f10 (GHz) for the 1<->2 Ramsey fringes.
  std::vector<double> drive_offsets{-0.195, -0.190};
  double prep_fwhm = 4.0;
  double fwhm = 6.0;
  double t_max = 500.0;
  double t_step = 2.0;
};

struct F21Estimate {
  /// Estimated f21, GHz.
  double f21 = 0.0;
  /// Estimated f21 - f10, GHz.
  double anharmonicity = 0.0;
  /// Largest disagreement between the drive offsets, GHz.
  double spread = 0.0;
  std::vector<FringeFit> fits;
};

/// Prepares |1> with a short Gaussian (pi)10 pulse, then runs a Ramsey fringe
/// on 1<->2 at each detuned drive. Each fringe gives |f21 - f_drive|; the
/// sign is fixed by the candidate shared by all drives. Throws InvalidArgument
/// for fewer than two drives and FitError when a fringe does not oscillate.
F21Estimate measure_f21(const Simulator& sim, const F21Options& options = {});

struct BetaOptimum {
  double beta = 0.0;
  PhaseError epsilon;
  double amplitude = 0.0;
};

/// Phase error of a DerivativeScaled(beta) rotation.
PhaseError beta_phase_error(const Simulator& sim, double beta, double theta, double fwhm, double amplitude);

/// Bisection on the sign of eps(beta). Throws FitError when eps does not
/// change sign on the bracket or the root does not null eps below 0.1 deg.
BetaOptimum optimize_beta(const Simulator& sim, double theta, double fwhm, double beta_lo, double beta_hi,
                          std::optional<double> amplitude = std::nullopt);

struct CalibrationRecord {
  double pi_amplitude = 0.0;
  double pi_residual = 0.0;
  double half_pi_amplitude = 0.0;
  double half_pi_residual = 0.0;
  /// |A(pi/2) - A(pi)/2| / (A(pi)/2).
  double half_pi_check = 0.0;
  double f10_est = 0.0;
  double f10_residual = 0.0;
  double f21_est = 0.0;
  double f21_residual = 0.0;
  double z_pi_amplitude = 0.0;
  double z_pi_residual = 0.0;
  double beta_star = 0.0;
  double beta_residual = 0.0;
  double fwhm = 6.0;
  /// Shaping protocol the amplitudes were tuned for.
  std::string protocol = "hd";
  std::string config_hash;
  std::string tool_version;

  double anharmonicity() const { return f21_est - f10_est; }
};

nlohmann::json to_json(const CalibrationRecord& r);
CalibrationRecord calibration_record_from_json(const nlohmann::json& j);

}  // namespace phaseq
