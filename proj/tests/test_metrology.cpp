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

#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "phaseq/calibration.hpp"
#include "phaseq/error.hpp"
#include "phaseq/metrology.hpp"
#include "phaseq/simulator.hpp"

using namespace phaseq;

namespace {

constexpr double kPi = std::numbers::pi;

QuditParams device(int dim) {
  QuditParams p;
  p.dim = dim;
  return p;
}

// Phase of the first Fourier component, fitted independently of fit_fringe.
double fourier_phase(const std::vector<double>& phi, const std::vector<double>& p) {
  double c = 0.0, s = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    c += p[i] * std::cos(phi[i]);
    s += p[i] * std::sin(phi[i]);
  }
  return std::atan2(s, c);
}

Eigen::MatrixXcd pulse_unitary(const oracle::Ladder& lad, double amplitude, double angle, double axis, double dt) {
  GateSpec g;
  g.angle = angle;
  g.amplitude = amplitude;
  g.axis_phi = axis;
  g.fwhm = 6.0;
  const std::vector<SequenceItem> items{g};
  const ControlSequence seq = schedule(items);
  Eigen::MatrixXcd u(lad.dim, lad.dim);
  for (int k = 0; k < lad.dim; ++k) u.col(k) = oracle::evolve(lad, seq, k, dt);
  return u;
}

}  // namespace

TEST_CASE("two-level APE shows no shift") {
  const Simulator sim(device(2));
  ApeSettings s;
  s.phi_points = 32;
  const ApeResult r = run_ape(sim, s);
  REQUIRE(r.n_list == std::vector<int>{0, 1, 3, 5});
  for (double shift : r.shifts) CHECK(std::abs(shift) <= 1e-4);
  CHECK(std::abs(r.epsilon_per_gate) <= 1e-4);
  CHECK(r.rejected.empty());
}

TEST_CASE("APE with n = 0 only") {
  ApeSettings s;
  s.n_list = {0};
  s.phi_points = 16;
  const ApeResult r = run_ape(Simulator(device(3)), s);
  REQUIRE(r.shifts.size() == 1);
  CHECK(r.shifts[0] == 0.0);
  CHECK(r.epsilon_per_gate == 0.0);
}

TEST_CASE("APE input validation") {
  const Simulator sim(device(3));
  ApeSettings s;
  s.n_list = {1, 3};
  CHECK_THROWS_AS(run_ape(sim, s), InvalidArgument);
  s.n_list = {0, -1};
  CHECK_THROWS_AS(run_ape(sim, s), InvalidArgument);
  s.n_list = {0, 1};
  s.phi_points = 12;
  CHECK_THROWS_AS(run_ape(sim, s), InvalidArgument);
  s.phi_points = 16;
  s.transition = Transition::k12;
  CHECK_THROWS_AS(run_ape(Simulator(device(2)), s), InvalidArgument);
}

TEST_CASE("visibility floor rejects flat fringes") {
  std::vector<FringeScan> fringes;
  for (double amp : {0.5, 0.5, 0.01, 0.5}) {
    FringeScan f;
    f.abscissa = phase_grid(32);
    for (double phi : f.abscissa) f.p.push_back(0.5 + amp * std::cos(phi));
    fringes.push_back(f);
  }
  const ApeResult r = analyze_ape({0, 1, 3, 5}, fringes, 0.05);
  CHECK(r.rejected == std::vector<int>{3});
  CHECK(r.n_list == std::vector<int>{0, 1, 5});

  std::vector<FringeScan> bad_zero = fringes;
  std::swap(bad_zero[0], bad_zero[2]);
  CHECK_THROWS_AS(analyze_ape({0, 1, 3, 5}, bad_zero, 0.05), FitError);
  std::vector<FringeScan> only_zero{fringes[0], fringes[2]};
  CHECK_THROWS_AS(analyze_ape({0, 3}, only_zero, 0.05), FitError);
}

TEST_CASE("analytic APE reproduces the predicted shift") {
  for (double eps : {-0.03, 0.01, 0.05}) {
    const std::vector<int> ns{0, 1, 2, 3, 5};
    const ApeResult r = run_ape_analytic(PhaseError{eps}, ns, 64);
    for (std::size_t i = 0; i < r.n_list.size(); ++i) {
      const double n_eps = r.n_list[i] * std::abs(eps);
      CHECK(std::abs(r.shifts[i] - predicted_ape_shift(r.n_list[i], PhaseError{eps})) <=
            5.0 * n_eps * n_eps * n_eps + 1e-12);
    }
    CHECK(r.epsilon_per_gate == doctest::Approx(eps).epsilon(0.08));
    CHECK(r.linearity_residual <= 0.05);
    CHECK(r.odd_count_estimate == doctest::Approx(r.shifts.back() / 11.0));
  }
}

TEST_CASE("simulated APE against composed oracle propagators") {
  const Simulator sim(device(3));
  const double half_pi = tune_amplitude(sim, ShapingProtocol::gaussian_only(), kPi / 2, 6.0).amplitude;
  ApeSettings s;
  s.half_pi_amplitude = half_pi;
  s.n_list = {0, 1, 3, 5};
  s.phi_points = 16;
  const ApeResult r = run_ape(sim, s);

  const oracle::Ladder lad{3, 6.0, -0.2, 6.0};
  const double dt = 2e-3;
  const Eigen::MatrixXcd plus = pulse_unitary(lad, half_pi, kPi / 2, 0.0, dt);
  const Eigen::MatrixXcd minus = pulse_unitary(lad, -half_pi, -kPi / 2, 0.0, dt);
  const std::vector<double> phis = phase_grid(16);
  std::vector<Eigen::MatrixXcd> finals;
  for (double phi : phis) finals.push_back(pulse_unitary(lad, half_pi, kPi / 2, phi, dt));
  std::vector<double> phase0;
  for (int n : s.n_list) {
    Eigen::VectorXcd psi = plus.col(0);
    for (int k = 0; k < n; ++k) psi = minus * (plus * psi);
    std::vector<double> p;
    for (const auto& f : finals) p.push_back(std::norm((f * psi)(1)));
    phase0.push_back(fourier_phase(phis, p));
  }
  for (std::size_t i = 0; i < s.n_list.size(); ++i) {
    const double expect = std::remainder(phase0[0] - phase0[i], 2 * kPi);
    CHECK(r.shifts[i] == doctest::Approx(expect).epsilon(1e-3).scale(1e-6));
  }
  // Several degrees per gate, positive like the effective-gate estimate.
  const double deg = r.epsilon_per_gate * 180 / kPi;
  CHECK(deg > 1.0);
  CHECK(deg < 10.0);
  CHECK(r.linearity_residual <= 0.05);

  ApeSettings hd = s;
  hd.protocol = ShapingProtocol::half_derivative();
  hd.half_pi_amplitude.reset();
  const ApeResult rh = run_ape(sim, hd);
  CHECK(std::abs(rh.epsilon_per_gate) <= 0.25 * std::abs(r.epsilon_per_gate));
}

TEST_CASE("visibility without and with decay") {
  const Simulator sim(device(3));
  ApeSettings s;
  s.phi_points = 16;
  s.n_list = {0, 1, 2, 3, 5};
  const ApeResult plain = run_ape(sim, s);
  // The pseudo-identity tilts the state off the equator at order eps^2, so
  // the 2% band holds while n eps stays small.
  for (std::size_t i = 0; i < plain.n_list.size(); ++i) {
    const double drift = std::abs(plain.visibilities[i] - plain.visibilities[0]) / plain.visibilities[0];
    if (plain.n_list[i] * plain.epsilon_per_gate <= 0.25) CHECK(drift <= 0.02);
    CHECK(drift <= 0.1);
  }
  ApeSettings hd = s;
  hd.protocol = ShapingProtocol::half_derivative();
  const ApeResult smooth = run_ape(sim, hd);
  for (double v : smooth.visibilities) CHECK(std::abs(v - smooth.visibilities[0]) <= 0.02 * smooth.visibilities[0]);
  const ApeResult ideal = run_ape_analytic(PhaseError{0.25}, {0, 1, 2}, 32);
  CHECK(ideal.visibilities[2] < ideal.visibilities[0]);

  s.visibility_decay = 200.0;
  const ApeResult decayed = run_ape(sim, s);
  for (std::size_t i = 1; i < decayed.visibilities.size(); ++i) {
    CHECK(decayed.visibilities[i] < decayed.visibilities[i - 1]);
  }
  CHECK(decayed.epsilon_per_gate == doctest::Approx(plain.epsilon_per_gate).epsilon(1e-3));
}

TEST_CASE("shot noise is seeded") {
  const Simulator sim(device(3));
  ApeSettings s;
  s.phi_points = 16;
  s.noise = ShotNoise{500, 11};
  const ApeResult a = run_ape(sim, s);
  const ApeResult b = run_ape(sim, s);
  s.noise->seed = 12;
  const ApeResult c = run_ape(sim, s);
  CHECK(a.fringes[1].p == b.fringes[1].p);
  CHECK(a.fringes[1].p != c.fringes[1].p);
  for (double p : a.fringes[2].p) {
    const double k = p * 500;
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
  // Sampling noise stays well below the fringe scale.
  ApeSettings clean = s;
  clean.noise.reset();
  const ApeResult d = run_ape(sim, clean);
  CHECK(a.epsilon_per_gate == doctest::Approx(d.epsilon_per_gate).epsilon(0.5));
}

TEST_CASE("leakage versus width") {
  const Simulator sim(device(3));
  const auto g = leakage_scan(sim, ShapingProtocol::gaussian_only(), kPi, {6.0, 20.0});
  const auto h = leakage_scan(sim, ShapingProtocol::half_derivative(), kPi, {6.0, 20.0});
  CHECK(g[1].p2 < 1e-6);
  CHECK(h[1].p2 < 1e-6);
  CHECK(h[0].p2 > 1e-5);
  CHECK(h[0].p2 < 1e-3);
  CHECK(g[0].p2 / h[0].p2 >= 5.0);

  // Final |2> population against RK4 at the same calibrated amplitude.
  GateSpec gate;
  gate.angle = kPi;
  gate.amplitude = h[0].amplitude;
  gate.protocol = ShapingProtocol::half_derivative();
  const std::vector<SequenceItem> items{gate};
  const Eigen::VectorXcd psi = oracle::evolve({3, 6.0, -0.2, 6.0}, schedule(items), 0, 2e-3);
  CHECK(h[0].p2 == doctest::Approx(std::norm(psi(2))).epsilon(1e-3));

  CHECK_THROWS_AS(leakage_scan(Simulator(device(2)), ShapingProtocol::gaussian_only(), kPi, {6.0}),
                  InvalidArgument);
}

TEST_CASE("Ramsey error filter") {
  const Simulator sim(device(3));
  const std::vector<double> widths{6.0, 20.0};
  const auto delays = default_filter_delays();
  CHECK(delays.size() == 41);
  CHECK(delays.front() == 0.0);
  CHECK(delays.back() == doctest::Approx(10.0));
  const auto g = ramsey_error_filter(sim, ShapingProtocol::gaussian_only(), widths, delays);
  const auto h = ramsey_error_filter(sim, ShapingProtocol::half_derivative(), widths, delays);
  CHECK(g[1].p2_error < 1e-6);
  CHECK(h[1].p2_error < 1e-6);
  CHECK(h[0].p2_error > 1e-5);
  CHECK(h[0].p2_error < 1e-3);
  CHECK(g[0].p2_error / h[0].p2_error >= 5.0);
  CHECK(h[0].p2_min <= h[0].p2_max);
  // The interference average recovers the single-pulse leakage.
  const auto single = leakage_scan(sim, ShapingProtocol::gaussian_only(), kPi, {6.0});
  CHECK(g[0].p2_error == doctest::Approx(single[0].p2).epsilon(0.1));
  CHECK_THROWS_AS(ramsey_error_filter(sim, ShapingProtocol::gaussian_only(), widths, {}), InvalidArgument);
  CHECK_THROWS_AS(ramsey_error_filter(Simulator(device(2)), ShapingProtocol::gaussian_only(), widths, delays),
                  InvalidArgument);
}
