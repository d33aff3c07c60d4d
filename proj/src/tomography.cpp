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

#include "phaseq/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phaseq/calibration.hpp"
#include "phaseq/error.hpp"
#include "phaseq/gate_algebra.hpp"
#include "phaseq/optimize.hpp"
#include "phaseq/parallel.hpp"

namespace phaseq {

namespace {

constexpr double kPi = std::numbers::pi;

double qubit_p1(const StateVector& psi) {
  const double p0 = std::norm(psi(0));
  const double p1 = std::norm(psi(1));
  return p0 + p1 > 0.0 ? p1 / (p0 + p1) : 0.0;
}

StateVector apply_qubit_gate(const QubitGate& g, StateVector psi) {
  const cplx a = psi(0);
  const cplx b = psi(1);
  psi(0) = g(0, 0) * a + g(0, 1) * b;
  psi(1) = g(1, 0) * a + g(1, 1) * b;
  return psi;
}

}  // namespace

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double bloch_fidelity(const BlochVector& r, const BlochVector& target) {
  return 0.5 * (1.0 + r.dot(target) / std::max(target.norm(), 1e-300));
}

QstResult qst(const Simulator& sim, const std::vector<SequenceItem>& prep, const QstSettings& settings) {
  QstResult out;
  double p_identity = 0.0, p_x = 0.0, p_y = 0.0;
  const StateVector psi = sim.evolve(sim.schedule(prep));
  out.leakage = std::max(0.0, 1.0 - std::norm(psi(0)) - std::norm(psi(1)));
  out.flagged = out.leakage > settings.leakage_flag;
  p_identity = qubit_p1(psi);

  if (settings.mode == PreRotationMode::Ideal) {
    p_x = qubit_p1(apply_qubit_gate(rotation(0.0, kPi / 2), psi));
    p_y = qubit_p1(apply_qubit_gate(rotation(kPi / 2, kPi / 2), psi));
  } else {
    const double amplitude =
        settings.half_pi_amplitude
            ? *settings.half_pi_amplitude
            : tune_amplitude(sim, settings.protocol, kPi / 2, settings.fwhm).amplitude;
    auto measured = [&](double axis) {
      std::vector<SequenceItem> items = prep;
      items.push_back(sim.gate(Transition::k01, kPi / 2, amplitude, settings.protocol, settings.fwhm, axis));
      return qubit_p1(sim.evolve(sim.schedule(items)));
    };
    p_x = measured(0.0);
    p_y = measured(kPi / 2);
  }
  if (settings.noise) {
    const std::uint64_t base = 3 * settings.noise_stream;
    p_identity = sample_probability(p_identity, *settings.noise, base);
    p_x = sample_probability(p_x, *settings.noise, base + 1);
    p_y = sample_probability(p_y, *settings.noise, base + 2);
  }
  auto clip = [](double v) { return std::clamp(v, -1.0, 1.0); };
  out.bloch = BlochVector{clip(2.0 * p_y - 1.0), clip(1.0 - 2.0 * p_x), clip(1.0 - 2.0 * p_identity)};
  return out;
}

TrajectoryScan x_rotation_trajectory(const Simulator& sim, const ShapingProtocol& protocol, double fwhm,
                                     const std::vector<double>& theta_grid, std::optional<double> pi_amplitude,
                                     const QstSettings& settings) {
  for (double theta : theta_grid) {
    if (theta < 0.0 || theta > kPi + 1e-12) throw InvalidArgument("x_rotation_trajectory: theta outside [0, pi]");
  }
  const double a_pi = pi_amplitude ? *pi_amplitude : tune_amplitude(sim, protocol, kPi, fwhm).amplitude;
  TrajectoryScan scan;
  scan.descriptor = "x_rotation:" + protocol.name();
  scan.parameter = theta_grid;
  scan.bloch.resize(theta_grid.size());
  scan.leakage.resize(theta_grid.size());
  parallel_for(theta_grid.size(), sim.workers(), [&](std::size_t i) {
    const double theta = theta_grid[i];
    const std::vector<SequenceItem> prep{sim.gate(Transition::k01, theta, a_pi * theta / kPi, protocol, fwhm)};
    QstSettings point = settings;
    point.noise_stream = i;
    const QstResult r = qst(sim, prep, point);
    scan.bloch[i] = r.bloch;
    scan.leakage[i] = r.leakage;
  });
  return scan;
}

HadamardPulses HadamardPulses::nominal(double pi_amplitude, double z_pi_amplitude, double fwhm) {
  HadamardPulses h;
  h.fwhm = fwhm;
  h.x_amplitude = pi_amplitude / std::sqrt(2.0);
  h.z_amplitude = -z_pi_amplitude / std::sqrt(2.0);
  return h;
}

std::vector<SequenceItem> hadamard_items(const Simulator& sim, const HadamardPulses& pulses, double s) {
  if (s < 0.0 || s > 2.0 + 1e-12) throw InvalidArgument("hadamard_trajectory: s outside [0, 2]");
  auto stage = [&](double scale, std::vector<SequenceItem>& items) {
    items.push_back(sim.gate(Transition::k01, scale * kPi / std::sqrt(2.0), scale * pulses.x_amplitude,
                             ShapingProtocol::half_derivative(), pulses.fwhm));
    ZPulseSpec z;
    z.amplitude = scale * pulses.z_amplitude;
    z.fwhm = pulses.fwhm;
    z.placement.simultaneous = true;
    items.push_back(z);
  };
  std::vector<SequenceItem> items;
  stage(std::min(s, 1.0), items);
  if (s > 1.0) stage(s - 1.0, items);
  return items;
}

HadamardPulses tune_hadamard(const Simulator& sim, const HadamardPulses& nominal, const QstSettings& settings,
                             int rounds) {
  if (rounds < 1) throw InvalidArgument("tune_hadamard: rounds must be positive");
  HadamardPulses h = nominal;
  QstSettings clean = settings;
  clean.noise.reset();
  auto infidelity = [&](const HadamardPulses& trial) {
    return 1.0 - bloch_fidelity(qst(sim, hadamard_items(sim, trial, 1.0), clean).bloch, BlochVector{1, 0, 0});
  };
  for (int r = 0; r < rounds; ++r) {
    const ScalarMinimum mx = golden_section_minimize(
        [&](double k) {
          HadamardPulses t = h;
          t.x_amplitude = k * nominal.x_amplitude;
          return infidelity(t);
        },
        0.8, 1.3, 1e-6);
    h.x_amplitude = mx.x * nominal.x_amplitude;
    const ScalarMinimum mz = golden_section_minimize(
        [&](double k) {
          HadamardPulses t = h;
          t.z_amplitude = k * nominal.z_amplitude;
          return infidelity(t);
        },
        0.8, 1.3, 1e-6);
    h.z_amplitude = mz.x * nominal.z_amplitude;
    h.residual = mz.value;
  }
  return h;
}

TrajectoryScan hadamard_trajectory(const Simulator& sim, const HadamardPulses& pulses,
                                   const std::vector<double>& s_grid, const QstSettings& settings) {
  for (double s : s_grid) {
    if (s < 0.0 || s > 2.0 + 1e-12) throw InvalidArgument("hadamard_trajectory: s outside [0, 2]");
  }
  TrajectoryScan scan;
  scan.descriptor = "hadamard";
  scan.parameter = s_grid;
  scan.bloch.resize(s_grid.size());
  scan.leakage.resize(s_grid.size());
  parallel_for(s_grid.size(), sim.workers(), [&](std::size_t i) {
    QstSettings point = settings;
    point.noise_stream = i;
    const QstResult r = qst(sim, hadamard_items(sim, pulses, s_grid[i]), point);
    scan.bloch[i] = r.bloch;
    scan.leakage[i] = r.leakage;
  });
  return scan;
}

}  // namespace phaseq
