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

// Closed-form 2x2 model of ideal and phase-corrupted single-qubit gates.
//
// Convention: Z_eps = diag(1, exp(-i eps)) and a corrupted rotation is
// Z_eps X_theta Z_eps. Gates are compared modulo a global phase.

#include <complex>

#include <Eigen/Core>

namespace phaseq {

using cplx = std::complex<double>;
using QubitGate = Eigen::Matrix2cd;

/// Per-gate z-phase error in radians.
struct PhaseError {
  double rad = 0.0;
};

/// exp(-i theta/2 (cos(phi) sx + sin(phi) sy)).
QubitGate rotation(double axis_phi, double theta);

QubitGate z_phase(PhaseError eps);

/// Z_eps X_theta Z_eps.
QubitGate corrupted_rotation(double theta, PhaseError eps);

/// X'_{-theta} X'_{theta}; the +theta rotation acts first.
QubitGate pseudo_identity(double theta, PhaseError eps);

/// Relative z-phase accumulated after n pseudo-identities: 2 n eps.
double predicted_ape_shift(int n, PhaseError eps);

/// min over phi of max-norm |a - exp(i phi) b|, with phi taken from the
/// phase of tr(b^dagger a).
double distance_mod_phase(const QubitGate& a, const QubitGate& b);

struct EpsilonFit {
  PhaseError epsilon;
  /// max-norm distance between the phase-normalized gate and the
  /// corrupted pi/2 template evaluated at `epsilon`.
  double residual = 0.0;
};

inline constexpr double kEpsilonConformanceThreshold = 0.05;

/// Fits the corrupted pi/2 template. Never throws.
EpsilonFit fit_epsilon(const QubitGate& gate);

/// Same as fit_epsilon but throws FitError when the residual exceeds
/// kEpsilonConformanceThreshold.
PhaseError extract_epsilon(const QubitGate& gate);

QubitGate gate_power(const QubitGate& gate, int n);

/// max-norm of G^dagger G - I.
double unitarity_defect(const QubitGate& gate);

}  // namespace phaseq
