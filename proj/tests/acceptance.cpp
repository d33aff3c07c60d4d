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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "phaseq/calibration.hpp"
#include "phaseq/fringe.hpp"
#include "phaseq/gate_algebra.hpp"
#include "phaseq/metrology.hpp"
#include "phaseq/qudit.hpp"
#include "phaseq/simulator.hpp"
#include "phaseq/tomography.hpp"

using namespace phaseq;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;
const cplx kI(0.0, 1.0);

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

QuditParams device(int dim) {
  QuditParams p;
  p.dim = dim;
  p.f10 = 6.0;
  p.anharmonicity = -0.2;
  return p;
}

ControlSequence single(const Simulator& sim, const GateSpec& g) {
  const SequenceItem item = g;
  return sim.schedule(std::span(&item, 1));
}

double gate_eps(const Simulator& sim, const ShapingProtocol& shape, double theta, double fwhm) {
  const double a = tune_amplitude(sim, shape, theta, fwhm).amplitude;
  return effective_gate(sim.params(), single(sim, sim.gate(Transition::k01, theta, a, shape, fwhm)), sim.config())
      .fit.epsilon.rad;
}

// Bloch vector of the qubit part of a state, read directly from amplitudes.
BlochVector direct_bloch(const StateVector& psi) {
  const cplx r = std::conj(psi(0)) * psi(1);
  const double n = std::norm(psi(0)) + std::norm(psi(1));
  return {2 * r.real() / n, 2 * r.imag() / n, (std::norm(psi(0)) - std::norm(psi(1))) / n};
}

double dist(const BlochVector& a, const BlochVector& b) {
  return std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2) + std::pow(a.z - b.z, 2));
}

// 1. Closed-form algebra.
Outcome algebra() {
  Outcome o;
  double worst_matrix = 0.0, worst_four = -1.0, worst_slope = -1.0;
  for (int k = 1; k <= 30; ++k) {
    const double e = 0.01 * k;
    QubitGate exact;
    exact << std::exp(-kI * e) * std::cos(e), std::exp(-2.0 * kI * e) * std::sin(e),
        -std::exp(-2.0 * kI * e) * std::sin(e), std::exp(-3.0 * kI * e) * std::cos(e);
    worst_matrix = std::max(worst_matrix, (pseudo_identity(kPi / 2, {e}) - exact).cwiseAbs().maxCoeff());
    const double d4 = distance_mod_phase(gate_power(corrupted_rotation(kPi / 2, {e}), 4), QubitGate::Identity());
    worst_four = std::max(worst_four, d4 - 4 * e * e);
    for (int n = 1; n <= 5; ++n) {
      if (n * e > 0.3) continue;
      const QubitGate g = gate_power(pseudo_identity(kPi / 2, {e}), n);
      const double slope = std::arg(g(1, 1) / g(0, 0));
      worst_slope = std::max(worst_slope, std::abs(slope + 2 * n * e) - std::pow(n * e, 3));
    }
  }
  o.require(worst_matrix <= 1e-12, fmt("pseudo-identity matrix error %.1e", worst_matrix));
  o.require(worst_four <= 1e-14, fmt("max(d(X^4, I) - 4 eps^2) %.1e", worst_four));
  o.require(worst_slope <= 1e-12, fmt("max(|slope + 2 n eps| - (n eps)^3) %.1e", worst_slope));
  return o;
}

// 2. Integrator.
Outcome integrator() {
  Outcome o;
  const QuditParams p = device(3);
  const Simulator sim(p);
  GateSpec g = sim.gate(Transition::k01, kPi, amplitude_for_angle(kPi, 6.0), ShapingProtocol::gaussian_only(), 6.0);
  const ControlSequence seq = single(sim, g);
  const Trajectory tr = propagate(p, seq, PropagatorConfig{.dt = 0.005}, basis_state(3, 0));
  const double unitarity = (tr.unitary.adjoint() * tr.unitary - Eigen::MatrixXcd::Identity(3, 3)).norm();
  o.require(tr.max_norm_defect <= 1e-9, fmt("norm defect %.1e", tr.max_norm_defect));
  o.require(unitarity <= 1e-9, fmt("unitarity defect %.1e", unitarity));
  auto u = [&](double dt) { return propagate(p, seq, PropagatorConfig{.dt = dt}, basis_state(3, 0)).unitary; };
  const Eigen::MatrixXcd u10 = u(0.01), u5 = u(0.005), u25 = u(0.0025);
  const double ratio = (u10 - u5).norm() / (u5 - u25).norm();
  o.require(ratio >= 3.2 && ratio <= 4.8, fmt("dt^2 ratio %.3f", ratio));
  return o;
}

// 3. Leakage of calibrated pi pulses.
Outcome leakage() {
  Outcome o;
  const Simulator sim(device(3));
  const double g = leakage_scan(sim, ShapingProtocol::gaussian_only(), kPi, {6.0})[0].p2;
  const double h = leakage_scan(sim, ShapingProtocol::half_derivative(), kPi, {6.0})[0].p2;
  o.require(h >= 2e-5 && h <= 5e-4, fmt("P2(hd) %.2e", h));
  o.require(g / h >= 5.0, fmt("P2(gaussian) %.2e, ratio %.1f", g, g / h));
  return o;
}

// 4. APE phase error per gate.
Outcome ape() {
  Outcome o;
  const Simulator sim(device(3));
  ApeSettings s;
  s.protocol = ShapingProtocol::gaussian_only();
  const ApeResult g = run_ape(sim, s);
  s.protocol = ShapingProtocol::half_derivative();
  const ApeResult h = run_ape(sim, s);
  const double eg = g.epsilon_per_gate * kDeg, eh = h.epsilon_per_gate * kDeg;
  o.require(eg >= 3.0 && eg <= 12.0, fmt("gaussian %.2f deg/gate", eg));
  o.require(std::abs(eh) <= 0.25 * std::abs(eg), fmt("hd %.3f deg/gate", eh));
  o.require(g.rejected.empty(), "no rejected fringes");
  o.require(g.linearity_residual <= 0.05,
            fmt("linearity residual %.4f (hd %.4f, not gated)", g.linearity_residual, h.linearity_residual));
  return o;
}

// 5. Derivative coefficient that nulls the phase error.
Outcome beta() {
  Outcome o;
  const Simulator sim(device(3));
  const BetaOptimum b = optimize_beta(sim, kPi / 2, 6.0, 0.0, 1.5);
  o.require(b.beta >= 0.3 && b.beta <= 0.7, fmt("beta* %.4f", b.beta));
  o.require(std::abs(b.epsilon.rad) * kDeg < 0.1, fmt("eps(beta*) %.2e deg", b.epsilon.rad * kDeg));
  std::vector<double> sweep;
  for (int i = 0; i <= 20; ++i) sweep.push_back(beta_phase_error(sim, 0.05 * i, kPi / 2, 6.0, b.amplitude).rad);
  int sign_changes = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) sign_changes += (sweep[i] > 0) != (sweep[i - 1] > 0);
  o.require(sweep.front() * sweep.back() < 0.0,
            fmt("eps(0) %.3f deg, eps(1) %.3f deg", sweep.front() * kDeg, sweep.back() * kDeg));
  o.require(sign_changes == 1, fmt("sweep sign changes %.0f", sign_changes));
  const double lo = 0.05 * (std::find_if(sweep.begin(), sweep.end(), [&](double e) { return e * sweep[0] <= 0; }) -
                            sweep.begin() - 1);
  o.require(b.beta >= lo && b.beta <= lo + 0.05, fmt("sweep bracket [%.2f, %.2f]", lo, lo + 0.05));
  return o;
}

// 6. Phase error scaling with angle and width.
Outcome scaling() {
  Outcome o;
  const Simulator sim(device(3));
  const auto shape = ShapingProtocol::gaussian_only();
  const double half = gate_eps(sim, shape, kPi / 2, 6.0);
  const double quarter = gate_eps(sim, shape, kPi / 4, 6.0);
  const double wide = gate_eps(sim, shape, kPi / 2, 12.0);
  o.require(half / quarter >= 3.0 && half / quarter <= 5.0, fmt("eps(pi/2)/eps(pi/4) %.3f", half / quarter));
  o.require(half / wide >= 1.6 && half / wide <= 2.4, fmt("eps(6 ns)/eps(12 ns) %.3f", half / wide));
  return o;
}

// 7. Calibration ladder.
Outcome calibration() {
  Outcome o;
  const Simulator sim(device(3));
  double worst = 0.0;
  for (double df : {0.0, 0.001, -0.001, 0.010, -0.010}) {
    worst = std::max(worst, std::abs(track_frequency(sim, df, 400.0).detuning - df));
  }
  o.require(worst <= 5e-4, fmt("tracking error %.2e GHz", worst));

  const std::vector<double> t{0.0, 20.0, 40.0, 60.0, 80.0, 100.0};
  const std::vector<double> phi = phase_grid(24);
  const double slope = ridge_slope(two_d_ramsey(sim, 0.010, t, phi), t, phi);
  const double want = 2 * kPi * 0.010;
  o.require(std::abs(slope - want) <= 0.05 * want, fmt("2D Ramsey slope %.5f vs %.5f rad/ns", slope, want));

  const F21Estimate f21 = measure_f21(sim);
  o.require(std::abs(f21.anharmonicity + 0.2) <= 1e-3, fmt("anharmonicity %.5f GHz", f21.anharmonicity));

  const double half = tune_amplitude(sim, ShapingProtocol::half_derivative(), kPi / 2, 6.0).amplitude;
  const double full = tune_amplitude(sim, ShapingProtocol::half_derivative(), kPi, 6.0).amplitude;
  o.require(std::abs(half - full / 2) <= 0.01 * full / 2, fmt("A(pi/2) / (A(pi)/2) %.5f", half / (full / 2)));

  ZCalibrationOptions zo;
  zo.half_pi_amplitude = half;
  const ZCalibration z = calibrate_z(sim, zo);
  // Gaussian Z pulse truncated at +-2 FWHM: the pi amplitude from its area.
  const double w = zo.z_fwhm;
  const double area = w * std::sqrt(kPi / (4 * std::log(2.0))) * std::erf(2.0 * std::sqrt(4 * std::log(2.0)));
  const double z_pi = 0.5 / area;
  o.require(std::abs(z.z_pi_amplitude - z_pi) <= 0.02 * z_pi, fmt("Z_pi %.5f vs %.5f GHz", z.z_pi_amplitude, z_pi));
  return o;
}

// 8. Tomography.
Outcome tomography() {
  Outcome o;
  const Simulator sim(device(3));
  const auto hd = ShapingProtocol::half_derivative();
  const double a_pi = tune_amplitude(sim, hd, kPi, 6.0).amplitude;

  double worst = -1.0;
  for (double frac : {0.25, 0.5, 0.75, 1.0}) {
    for (double axis : {0.0, 1.2}) {
      const std::vector<SequenceItem> prep{sim.gate(Transition::k01, kPi * frac, a_pi * frac, hd, 6.0, axis)};
      const StateVector psi = sim.evolve(sim.schedule(prep));
      const double leak = std::max(0.0, 1.0 - std::norm(psi(0)) - std::norm(psi(1)));
      worst = std::max(worst, dist(qst(sim, prep).bloch, direct_bloch(psi)) - (3 * leak + 1e-6));
    }
  }
  o.require(worst <= 0.0, fmt("max(QST error - bound) %.1e", worst));

  std::vector<double> thetas;
  for (int i = 0; i <= 20; ++i) thetas.push_back(kPi * i / 20);
  const TrajectoryScan x = x_rotation_trajectory(sim, hd, 6.0, thetas, a_pi);
  double off = 0.0;
  for (const auto& b : x.bloch) off = std::max(off, std::abs(b.x));
  o.require(off <= 0.02, fmt("hd off-meridian |x| %.4f", off));

  ZCalibrationOptions zo;
  zo.half_pi_amplitude = tune_amplitude(sim, hd, kPi / 2, 6.0).amplitude;
  const HadamardPulses nominal = HadamardPulses::nominal(a_pi, calibrate_z(sim, zo).z_pi_amplitude);
  const HadamardPulses tuned = tune_hadamard(sim, nominal);
  const TrajectoryScan h = hadamard_trajectory(sim, tuned, {1.0, 2.0});
  const double f1 = bloch_fidelity(h.bloch[0], {1, 0, 0});
  const double f2 = bloch_fidelity(h.bloch[1], {0, 0, 1});
  const double raw = bloch_fidelity(qst(sim, hadamard_items(sim, nominal, 1.0)).bloch, {1, 0, 0});
  o.require(f1 >= 0.999, fmt("F(s=1, |+>) %.5f (untuned %.5f)", f1, raw));
  o.require(f2 >= 0.999, fmt("F(s=2, |0>) %.5f", f2));
  return o;
}

// 9. Upper-transition APE on a four-level device.
Outcome qudit_ape() {
  Outcome o;
  const Simulator sim(device(4));
  ApeSettings s;
  s.protocol = ShapingProtocol::gaussian_only();
  const ApeResult lower = run_ape(sim, s);
  s.transition = Transition::k12;
  const ApeResult upper = run_ape(sim, s);
  const double e01 = lower.epsilon_per_gate * kDeg, e21 = upper.epsilon_per_gate * kDeg;
  o.require(std::abs(e21) <= std::abs(e01) / 3.0,
            fmt("eps21 %.3f deg vs eps10 %.3f deg", e21, e01) + fmt(", ratio %.3f (limit %.3f)", std::abs(e21 / e01),
                                                                     1.0 / 3.0));
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Analytic closure and byte-identical reruns of the command-line tool.
Outcome closure() {
  Outcome o;
  double worst = -1.0;
  for (double e : {-0.04, 0.01, 0.03, 0.05}) {
    const std::vector<int> ns{0, 1, 3, 5};
    const ApeResult r = run_ape_analytic(PhaseError{e}, ns, 64);
    for (std::size_t i = 0; i < r.n_list.size(); ++i) {
      const double ne = r.n_list[i] * std::abs(e);
      worst = std::max(worst, std::abs(r.shifts[i] - predicted_ape_shift(r.n_list[i], {e})) - 5 * ne * ne * ne);
    }
  }
  o.require(worst <= 1e-12, fmt("max(|shift - 2 n eps| - 5 (n eps)^3) %.1e", worst));

  const fs::path root = fs::temp_directory_path() / "phaseq_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg = root / "config.json";
  std::ofstream(cfg) << R"({"noise": {"enabled": true, "shots": 200}, "seed": 7,
                             "ape": {"n_list": [0, 1, 3], "phi_points": 24}})";
  std::vector<fs::path> dirs{root / "a", root / "b"};
  bool ran = true;
  for (const auto& d : dirs) {
    const std::string cmd = std::string("\"") + PHASEQ_CLI + "\" ape --config \"" + cfg.string() + "\" --out \"" +
                            d.string() + "\" --workers 2 > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  o.require(ran, "cli runs exit 0");
  std::size_t files = 0, same = 0;
  if (ran) {
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const fs::path other = dirs[1] / entry.path().filename();
      same += fs::exists(other) && slurp(entry.path()) == slurp(other);
    }
    std::size_t files_b = std::distance(fs::directory_iterator(dirs[1]), fs::directory_iterator{});
    o.require(files > 0 && same == files && files_b == files,
              fmt("%.0f of %.0f output files identical", static_cast<double>(same), static_cast<double>(files)));
  }
  fs::remove_all(root);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic gate algebra", algebra},
      {"integrator norm, unitarity and dt^2 convergence", integrator},
      {"leakage of calibrated pi pulses", leakage},
      {"APE phase error per gate", ape},
      {"derivative coefficient nulls the phase error", beta},
      {"phase error scaling with angle and width", scaling},
      {"calibration ladder", calibration},
      {"tomography trajectories and Hadamard", tomography},
      {"upper-transition APE on a four-level device", qudit_ape},
      {"analytic closure and deterministic reruns", closure},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed ? 1 : 0;
}
