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
#include "phaseq/tomography.hpp"

using namespace phaseq;

namespace {

constexpr double kPi = std::numbers::pi;

QuditParams device(int dim) {
  QuditParams p;
  p.dim = dim;
  return p;
}

double distance(const BlochVector& a, const oracle::Bloch& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

std::vector<SequenceItem> one(const GateSpec& g) { return {g}; }

}  // namespace

TEST_CASE("Bloch helpers") {
  CHECK(BlochVector{0, 0, 1}.norm() == 1.0);
  CHECK(bloch_fidelity({0, 0, 1}, {0, 0, 1}) == doctest::Approx(1.0));
  CHECK(bloch_fidelity({0, 0, 1}, {0, 0, -1}) == doctest::Approx(0.0));
  CHECK(bloch_fidelity({1, 0, 0}, {0, 0, 1}) == doctest::Approx(0.5));
  CHECK(bloch_fidelity({0.6, 0.0, 0.8}, {2, 0, 0}) == doctest::Approx(0.8));
}

TEST_CASE("ground state") {
  const QstResult r = qst(Simulator(device(3)), {});
  CHECK(std::abs(r.bloch.x) <= 1e-6);
  CHECK(std::abs(r.bloch.y) <= 1e-6);
  CHECK(std::abs(r.bloch.z - 1.0) <= 1e-6);
  CHECK(r.leakage == 0.0);
  CHECK_FALSE(r.flagged);
}

TEST_CASE("two-level conventions") {
  const Simulator sim(device(2));
  const double a = amplitude_for_angle(kPi / 2, 6.0) / truncated_area_fraction(12.0, 6.0);
  const auto gauss = ShapingProtocol::gaussian_only();
  const QstResult x = qst(sim, one(sim.gate(Transition::k01, kPi / 2, a, gauss, 6.0, 0.0)));
  CHECK(std::abs(x.bloch.x) <= 1e-6);
  CHECK(std::abs(x.bloch.y + 1.0) <= 1e-6);
  CHECK(std::abs(x.bloch.z) <= 1e-6);
  const QstResult y = qst(sim, one(sim.gate(Transition::k01, kPi / 2, a, gauss, 6.0, kPi / 2)));
  CHECK(std::abs(y.bloch.x - 1.0) <= 1e-6);
  CHECK(std::abs(y.bloch.y) <= 1e-6);

  // Simulated pre-rotations agree in two levels.
  QstSettings s;
  s.mode = PreRotationMode::Simulated;
  s.protocol = gauss;
  s.half_pi_amplitude = a;
  const QstResult xs = qst(sim, one(sim.gate(Transition::k01, kPi / 2, a, gauss, 6.0, 0.0)), s);
  CHECK(std::abs(xs.bloch.y + 1.0) <= 1e-6);
  const QstResult ys = qst(sim, one(sim.gate(Transition::k01, kPi / 2, a, gauss, 6.0, kPi / 2)), s);
  CHECK(std::abs(ys.bloch.x - 1.0) <= 1e-6);
}

TEST_CASE("three-level HD half-pi state matches the direct Bloch vector") {
  const Simulator sim(device(3));
  const auto hd = ShapingProtocol::half_derivative();
  const double a = tune_amplitude(sim, hd, kPi / 2, 6.0).amplitude;
  const auto prep = one(sim.gate(Transition::k01, kPi / 2, a, hd, 6.0));
  const oracle::Bloch direct = oracle::bloch(sim.evolve(sim.schedule(prep)));
  const QstResult r = qst(sim, prep);
  CHECK(distance(r.bloch, direct) <= 1e-4);

  QstSettings s;
  s.mode = PreRotationMode::Simulated;
  s.half_pi_amplitude = a;
  CHECK(distance(qst(sim, prep, s).bloch, direct) <= 0.02);
}

TEST_CASE("faithfulness and purity") {
  const Simulator sim(device(3));
  const auto hd = ShapingProtocol::half_derivative();
  const auto gauss = ShapingProtocol::gaussian_only();
  const double a = tune_amplitude(sim, hd, kPi, 6.0).amplitude;
  std::vector<std::vector<SequenceItem>> preps;
  for (double frac : {0.1, 0.33, 0.5, 0.77, 1.0}) {
    for (double axis : {0.0, 1.0, 2.5}) {
      preps.push_back(one(sim.gate(Transition::k01, kPi * frac, a * frac, hd, 6.0, axis)));
      preps.push_back(one(sim.gate(Transition::k01, kPi * frac, a * frac, gauss, 8.0, axis)));
    }
  }
  ZPulseSpec z;
  z.amplitude = 0.03;
  preps.push_back({sim.gate(Transition::k01, kPi / 2, a / 2, hd, 6.0), z});
  for (const auto& prep : preps) {
    const StateVector psi = sim.evolve(sim.schedule(prep));
    const double leak = 1.0 - std::norm(psi(0)) - std::norm(psi(1));
    if (leak >= 1e-3) continue;
    const QstResult r = qst(sim, prep);
    CHECK(r.leakage == doctest::Approx(std::max(0.0, leak)).epsilon(1e-9).scale(1e-15));
    CHECK(distance(r.bloch, oracle::bloch(psi)) <= 3 * leak + 1e-6);
    CHECK(r.bloch.norm() >= 1.0 - 5 * leak);
    CHECK(r.bloch.norm() <= 1.0 + 1e-6);
  }
}

TEST_CASE("x-rotation trajectories") {
  const Simulator sim(device(3));
  std::vector<double> thetas;
  for (int i = 0; i <= 20; ++i) thetas.push_back(kPi * i / 20);
  const TrajectoryScan g = x_rotation_trajectory(sim, ShapingProtocol::gaussian_only(), 6.0, thetas);
  const TrajectoryScan h = x_rotation_trajectory(sim, ShapingProtocol::half_derivative(), 6.0, thetas);
  REQUIRE(g.bloch.size() == thetas.size());
  CHECK(g.descriptor == "x_rotation:gaussian");

  // Gaussian leans off the x = 0 meridian by an amount fixed by the direct state.
  const double a_pi = tune_amplitude(sim, ShapingProtocol::gaussian_only(), kPi, 6.0).amplitude;
  double lean = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const auto prep =
        one(sim.gate(Transition::k01, thetas[i], a_pi * thetas[i] / kPi, ShapingProtocol::gaussian_only(), 6.0));
    const oracle::Bloch direct = oracle::bloch(sim.evolve(sim.schedule(prep)));
    CHECK(std::abs(g.bloch[i].x - direct.x) <= 1e-4);
    lean = std::max(lean, std::abs(g.bloch[i].x));
  }
  CHECK(lean > 0.02);

  double hd_lean = 0.0;
  for (const BlochVector& b : h.bloch) hd_lean = std::max(hd_lean, std::abs(b.x));
  CHECK(hd_lean <= 0.02);
  CHECK(hd_lean < lean / 2);
  CHECK(h.bloch.back().z <= -0.999);
  CHECK(h.bloch.front().z == doctest::Approx(1.0));

  CHECK_THROWS_AS(x_rotation_trajectory(sim, ShapingProtocol::gaussian_only(), 6.0, {0.0, 3.5}), InvalidArgument);
  CHECK_THROWS_AS(x_rotation_trajectory(sim, ShapingProtocol::gaussian_only(), 6.0, {-0.1}), InvalidArgument);
}

TEST_CASE("Hadamard trajectory") {
  const Simulator sim(device(3));
  const auto hd = ShapingProtocol::half_derivative();
  const double a_pi = tune_amplitude(sim, hd, kPi, 6.0).amplitude;
  ZCalibrationOptions zo;
  zo.half_pi_amplitude = tune_amplitude(sim, hd, kPi / 2, 6.0).amplitude;
  const double z_pi = calibrate_z(sim, zo).z_pi_amplitude;
  const HadamardPulses nominal = HadamardPulses::nominal(a_pi, z_pi);
  CHECK(nominal.x_amplitude == doctest::Approx(a_pi / std::sqrt(2.0)));
  CHECK(nominal.z_amplitude == doctest::Approx(-z_pi / std::sqrt(2.0)));

  const HadamardPulses tuned = tune_hadamard(sim, nominal);
  CHECK(tuned.residual <= 1e-3);
  const TrajectoryScan t = hadamard_trajectory(sim, tuned, {0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK(t.bloch[0].z == doctest::Approx(1.0));
  CHECK(std::abs(t.bloch[0].x) <= 1e-12);
  CHECK(bloch_fidelity(t.bloch[2], {1, 0, 0}) >= 0.999);
  CHECK(bloch_fidelity(t.bloch[4], {0, 0, 1}) >= 0.999);
  // Halfway, the state sits between the poles and the equator, off the y axis.
  CHECK(t.bloch[1].x > 0.1);
  CHECK(t.bloch[1].z > 0.1);

  // Two stages at s = 2; one at s <= 1.
  CHECK(hadamard_items(sim, tuned, 1.0).size() == 2);
  CHECK(hadamard_items(sim, tuned, 2.0).size() == 4);
  CHECK_THROWS_AS(hadamard_items(sim, tuned, 2.5), InvalidArgument);
  CHECK_THROWS_AS(hadamard_items(sim, tuned, -0.1), InvalidArgument);

  // The untuned pair under-rotates slightly but lands near |+>.
  const QstResult untuned = qst(sim, hadamard_items(sim, nominal, 1.0));
  CHECK(bloch_fidelity(untuned.bloch, {1, 0, 0}) > 0.99);
  CHECK(bloch_fidelity(untuned.bloch, {1, 0, 0}) < bloch_fidelity(t.bloch[2], {1, 0, 0}));
}

TEST_CASE("leakage flag") {
  const Simulator sim(device(3));
  const auto prep = one(sim.gate(Transition::k01, kPi, amplitude_for_angle(kPi, 3.0),
                                 ShapingProtocol::gaussian_only(), 3.0));
  QstSettings s;
  const QstResult r = qst(sim, prep, s);
  CHECK(r.leakage > 1e-3);
  CHECK(r.flagged == (r.leakage > 0.01));
  s.leakage_flag = 1e-4;
  CHECK(qst(sim, prep, s).flagged);
}

TEST_CASE("tomography shot noise") {
  const Simulator sim(device(3));
  const auto prep = one(sim.gate(Transition::k01, kPi / 3, amplitude_for_angle(kPi / 3, 6.0),
                                 ShapingProtocol::half_derivative(), 6.0, 0.7));
  QstSettings s;
  s.noise = ShotNoise{2000, 5};
  const QstResult a = qst(sim, prep, s);
  const QstResult b = qst(sim, prep, s);
  CHECK(a.bloch.x == b.bloch.x);
  CHECK(a.bloch.z == b.bloch.z);
  s.noise_stream = 1;
  const QstResult c = qst(sim, prep, s);
  CHECK((c.bloch.x != a.bloch.x || c.bloch.y != a.bloch.y || c.bloch.z != a.bloch.z));
  const QstResult clean = qst(sim, prep);
  for (const QstResult& r : {a, c}) {
    CHECK(std::abs(r.bloch.x - clean.bloch.x) < 0.12);
    CHECK(std::abs(r.bloch.y - clean.bloch.y) < 0.12);
    CHECK(std::abs(r.bloch.z - clean.bloch.z) < 0.12);
  }
  // Clipping keeps the pole on the sphere.
  QstSettings few;
  few.noise = ShotNoise{10, 1};
  const QstResult pole = qst(sim, {}, few);
  CHECK(pole.bloch.z <= 1.0);
  CHECK(pole.bloch.z >= -1.0);
}
