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

// Bloch-vector state tomography of simulated qubit states and the gate
// trajectories built from it.
//
// Pre-rotations {I, X_{pi/2}, Y_{pi/2}} map the Bloch components onto z:
//   z = 1 - 2 P1(I),  y = 1 - 2 P1(X_{pi/2}),  x = 2 P1(Y_{pi/2}) - 1.
// With these conventions X_{pi/2}|0> reconstructs to -y and Y_{pi/2}|0> to +x.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phaseq/noise.hpp"
#include "phaseq/pulse.hpp"
#include "phaseq/simulator.hpp"

namespace phaseq {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// Pure-state fidelity between the states on the sphere along r and target.
double bloch_fidelity(const BlochVector& r, const BlochVector& target);

enum class PreRotationMode {
  /// Exact qubit rotations applied to the simulated state.
  Ideal,
  /// Calibrated pi/2 pulses appended to the preparation and simulated.
  Simulated,
};

struct QstSettings {
  PreRotationMode mode = PreRotationMode::Ideal;
  double fwhm = 6.0;
  ShapingProtocol protocol = ShapingProtocol::half_derivative();
  /// Needed in Simulated mode; tuned when absent.
  std::optional<double> half_pi_amplitude;
  double leakage_flag = 0.01;
  /// Binomial sampling of the three P1 values; components are then clipped
  /// to [-1, 1].
  std::optional<ShotNoise> noise;
  /// Noise stream of this reconstruction; trajectories use the grid index.
  std::uint64_t noise_stream = 0;
};

struct QstResult {
  BlochVector bloch;
  /// Population outside {|0>, |1>} before the pre-rotations.
  double leakage = 0.0;
  /// Set when leakage exceeds QstSettings::leakage_flag.
  bool flagged = false;
};

/// P1 is measured inside the qubit subspace (renormalized by P0 + P1).
QstResult qst(const Simulator& sim, const std::vector<SequenceItem>& prep, const QstSettings& settings = {});

struct TrajectoryScan {
  std::string descriptor;
  std::vector<double> parameter;
  std::vector<BlochVector> bloch;
  std::vector<double> leakage;
};

/// Fixed-width rotation about x with amplitude scaled linearly to each angle
/// theta in [0, pi]. `pi_amplitude` is tuned for `protocol` when absent.
TrajectoryScan x_rotation_trajectory(const Simulator& sim, const ShapingProtocol& protocol, double fwhm,
                                     const std::vector<double>& theta_grid,
                                     std::optional<double> pi_amplitude = std::nullopt,
                                     const QstSettings& settings = {});

/// Stage amplitudes for the off-equator Hadamard: simultaneous HD X and
/// Gaussian Z pulses, each nominally a rotation by pi/sqrt(2), at s = 1.
struct HadamardPulses {
  double fwhm = 6.0;
  /// rad/ns; nominally pi_amplitude / sqrt(2).
  double x_amplitude = 0.0;
  /// GHz, signed; nominally -z_pi_amplitude / sqrt(2) since a positive z
  /// shift raises |1> and rotates about -z.
  double z_amplitude = 0.0;
  /// Infidelity of the s = 1 state with |+>, when known.
  double residual = 0.0;

  static HadamardPulses nominal(double pi_amplitude, double z_pi_amplitude, double fwhm = 6.0);
};

/// Level 2 Stark-shifts |1> against the Z detuning, which the HD quadrature
/// only nulls for a resonant drive, so the nominal pair under-rotates. This
/// rescales both stage amplitudes (alternating golden-section searches) to
/// minimise the s = 1 infidelity with |+> measured by qst.
HadamardPulses tune_hadamard(const Simulator& sim, const HadamardPulses& nominal, const QstSettings& settings = {},
                             int rounds = 4);

/// The preparation at sweep value s in [0, 2]: one stage scaled by min(s, 1),
/// then for s > 1 a second stage scaled by s - 1 after the first.
std::vector<SequenceItem> hadamard_items(const Simulator& sim, const HadamardPulses& pulses, double s);

TrajectoryScan hadamard_trajectory(const Simulator& sim, const HadamardPulses& pulses,
                                   const std::vector<double>& s_grid, const QstSettings& settings = {});

}  // namespace phaseq
