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

// Amplified phase error (APE) sequences, the Ramsey error filter and the
// leakage-versus-width scan.
//
// An APE sequence is  X_{pi/2} -> n x (X_{pi/2} X_{-pi/2}) -> phi_{pi/2}.
// A per-gate phase error eps moves the fringe maximum phi0 by -2 n eps; the
// reported shift is phi0(0) - phi0(n) so that it reads +2 n eps.

#include <optional>
#include <vector>

#include "phaseq/fringe.hpp"
#include "phaseq/gate_algebra.hpp"
#include "phaseq/noise.hpp"
#include "phaseq/pulse.hpp"
#include "phaseq/simulator.hpp"

namespace phaseq {

struct ApeSettings {
  ShapingProtocol protocol = ShapingProtocol::gaussian_only();
  double fwhm = 6.0;
  Transition transition = Transition::k01;
  std::vector<int> n_list{0, 1, 3, 5};
  int phi_points = 64;
  double gap = 0.0;
  /// Calibrated pi/2 amplitude on `transition`; tuned when absent.
  std::optional<double> half_pi_amplitude;
  /// Amplitude of the HD (pi)10 preparation used for the 1<->2 transition.
  std::optional<double> prep_pi_amplitude;
  /// Phenomenological visibility decay time, ns. Off when absent.
  std::optional<double> visibility_decay;
  std::optional<ShotNoise> noise;
  double visibility_floor = 0.05;
};

struct ApeResult {
  /// n values whose fringe passed the visibility floor, ascending.
  std::vector<int> n_list;
  std::vector<double> phase_offsets;
  /// phi0(0) - phi0(n), unwrapped, rad.
  std::vector<double> shifts;
  std::vector<double> visibilities;
  std::vector<int> rejected;
  /// Half the least-squares slope of shift versus n, rad.
  double epsilon_per_gate = 0.0;
  /// Shift at the largest n divided by the 2n+1 pulses it took, rad.
  double odd_count_estimate = 0.0;
  /// Largest deviation from the fitted line relative to the largest shift.
  double linearity_residual = 0.0;
  /// Every simulated fringe, in n_list order of the request.
  std::vector<int> fringe_n;
  std::vector<FringeScan> fringes;
};

/// Simulates every (n, phi) point and fits each fringe. Requires n_list to
/// contain 0 and phi_points >= 16. Throws FitError when the n = 0 fringe or
/// fewer than two fringes pass the visibility floor.
ApeResult run_ape(const Simulator& sim, const ApeSettings& settings);

/// The same protocol with ideal Z_eps X Z_eps matrices in place of the
/// simulator.
ApeResult run_ape_analytic(PhaseError eps, const std::vector<int>& n_list, int phi_points = 64);

/// Fringe fits and shift analysis shared by both paths.
ApeResult analyze_ape(const std::vector<int>& n_list, std::vector<FringeScan> fringes,
                      double visibility_floor = 0.05);

struct LeakagePoint {
  double fwhm = 0.0;
  double p2 = 0.0;
  double amplitude = 0.0;
};

/// Final |2> population after a calibrated rotation by theta from |0>, for
/// each width.
std::vector<LeakagePoint> leakage_scan(const Simulator& sim, const ShapingProtocol& protocol, double theta,
                                       const std::vector<double>& fwhm_list);

struct FilterPoint {
  double fwhm = 0.0;
  /// (max + min) / 4 of P2 over the delay scan: the mean per-pulse |2>
  /// occupation of the two interfering pulses.
  double p2_error = 0.0;
  double p2_min = 0.0;
  double p2_max = 0.0;
};

/// Two calibrated pi pulses separated by each delay; P2 oscillates with the
/// delay at the anharmonicity.
std::vector<FilterPoint> ramsey_error_filter(const Simulator& sim, const ShapingProtocol& protocol,
                                             const std::vector<double>& fwhm_list,
                                             const std::vector<double>& delays);

/// 41 delays on [0, 10] ns.
std::vector<double> default_filter_delays();

}  // namespace phaseq
