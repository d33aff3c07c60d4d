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

#include "phaseq/gate_algebra.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phaseq/error.hpp"

namespace phaseq {

namespace {

constexpr cplx kI{0.0, 1.0};

double max_abs(const QubitGate& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

QubitGate rotation(double axis_phi, double theta) {
  const double c = std::cos(theta / 2);
  const double s = std::sin(theta / 2);
  QubitGate g;
  g << c, -kI * s * std::polar(1.0, -axis_phi),  //
      -kI * s * std::polar(1.0, axis_phi), c;
  return g;
}

QubitGate z_phase(PhaseError eps) {
  QubitGate g = QubitGate::Zero();
  g(0, 0) = 1.0;
  g(1, 1) = std::polar(1.0, -eps.rad);
  return g;
}

QubitGate corrupted_rotation(double theta, PhaseError eps) {
  const QubitGate z = z_phase(eps);
  return z * rotation(0.0, theta) * z;
}

QubitGate pseudo_identity(double theta, PhaseError eps) {
  return corrupted_rotation(-theta, eps) * corrupted_rotation(theta, eps);
}

double predicted_ape_shift(int n, PhaseError eps) {
  if (n < 0) {
    throw InvalidArgument("predicted_ape_shift: n must be non-negative, got " + std::to_string(n));
  }
  return 2.0 * n * eps.rad;
}

double distance_mod_phase(const QubitGate& a, const QubitGate& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cplx{1.0, 0.0};
  return max_abs(a - phase * b);
}

EpsilonFit fit_epsilon(const QubitGate& gate) {
  QubitGate g = gate;
  if (std::abs(g(0, 0)) > 0.0) {
    g *= std::conj(g(0, 0)) / std::abs(g(0, 0));
  }
  double eps = -(std::arg(g(0, 1)) + std::numbers::pi / 2);
  // Fold into (-pi, pi].
  eps = std::remainder(eps, 2 * std::numbers::pi);
  EpsilonFit fit;
  fit.epsilon = PhaseError{eps};
  fit.residual = max_abs(g - corrupted_rotation(std::numbers::pi / 2, fit.epsilon));
  return fit;
}

PhaseError extract_epsilon(const QubitGate& gate) {
  const EpsilonFit fit = fit_epsilon(gate);
  if (!(fit.residual <= kEpsilonConformanceThreshold)) {
    throw FitError("extract_epsilon: gate does not match the corrupted pi/2 template (residual " +
                   std::to_string(fit.residual) + ")");
  }
  return fit.epsilon;
}

QubitGate gate_power(const QubitGate& gate, int n) {
  if (n < 0) {
    throw InvalidArgument("gate_power: negative exponent");
  }
  QubitGate out = QubitGate::Identity();
  for (int i = 0; i < n; ++i) {
    out = gate * out;
  }
  return out;
}

double unitarity_defect(const QubitGate& gate) {
  return max_abs(gate.adjoint() * gate - QubitGate::Identity());
}

}  // namespace phaseq
