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

#include "phaseq/metrology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phaseq/calibration.hpp"
#include "phaseq/error.hpp"
#include "phaseq/parallel.hpp"

namespace phaseq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;

void check_n_list(const std::vector<int>& n_list) {
  if (std::find(n_list.begin(), n_list.end(), 0) == n_list.end()) {
    throw InvalidArgument("APE n_list must include 0");
  }
  for (int n : n_list) {
    if (n < 0) throw InvalidArgument("APE n_list entries must be non-negative");
  }
}

}  // namespace

ApeResult analyze_ape(const std::vector<int>& n_list, std::vector<FringeScan> fringes,
                      double visibility_floor) {
  ApeResult out;
  out.fringe_n = n_list;

  std::vector<std::size_t> order(n_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return n_list[a] < n_list[b]; });

  std::vector<FringeFit> fits(fringes.size());
  for (std::size_t i = 0; i < fringes.size(); ++i) fits[i] = fit_fringe(fringes[i]);

  double baseline = 0.0;
  bool have_baseline = false;
  double previous_shift = 0.0;
  for (std::size_t idx : order) {
    const FringeFit& fit = fits[idx];
    const int n = n_list[idx];
    if (fit.amplitude < visibility_floor) {
      out.rejected.push_back(n);
      continue;
    }
    if (!have_baseline) {
      if (n != 0) throw FitError("APE: the n = 0 fringe was rejected");
      baseline = fit.phase_offset;
      have_baseline = true;
    }
    // The fringe maximum moves toward negative phi by 2 n eps.
    double shift = baseline - fit.phase_offset;
    shift -= kTwoPi * std::round((shift - previous_shift) / kTwoPi);
    previous_shift = shift;
    out.n_list.push_back(n);
    out.phase_offsets.push_back(fit.phase_offset);
    out.shifts.push_back(shift);
    out.visibilities.push_back(fit.amplitude);
  }
  if (!have_baseline) throw FitError("APE: the n = 0 fringe was rejected");
  out.fringes = std::move(fringes);
  if (out.n_list.size() < 2) {
    if (out.rejected.empty()) return out;  // n_list == {0}
    throw FitError("APE: fewer than two fringes passed the visibility floor");
  }

  const double count = static_cast<double>(out.n_list.size());
  double nm = 0.0, sm = 0.0;
  for (std::size_t i = 0; i < out.n_list.size(); ++i) {
    nm += out.n_list[i];
    sm += out.shifts[i];
  }
  nm /= count;
  sm /= count;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < out.n_list.size(); ++i) {
    num += (out.n_list[i] - nm) * (out.shifts[i] - sm);
    den += (out.n_list[i] - nm) * (out.n_list[i] - nm);
  }
  const double slope = num / den;
  const double intercept = sm - slope * nm;
  out.epsilon_per_gate = slope / 2.0;

  const int n_max = out.n_list.back();
  const double shift_max = out.shifts.back();
  out.odd_count_estimate = shift_max / (2.0 * n_max + 1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < out.n_list.size(); ++i) {
    worst = std::max(worst, std::abs(out.shifts[i] - (intercept + slope * out.n_list[i])));
  }
  out.linearity_residual = std::abs(shift_max) > 1e-6 ? worst / std::abs(shift_max) : 0.0;
  return out;
}

ApeResult run_ape(const Simulator& sim, const ApeSettings& settings) {
  check_n_list(settings.n_list);
  if (settings.phi_points < 16) throw InvalidArgument("APE needs at least 16 phase points");
  const int lo = lower_level(settings.transition);
  const int hi = lo + 1;
  if (hi >= sim.params().dim) throw InvalidArgument("APE transition outside the qudit");
  const bool upper = settings.transition == Transition::k12;

  const double half_pi =
      settings.half_pi_amplitude
          ? *settings.half_pi_amplitude
          : tune_amplitude(sim, settings.protocol, kPi / 2, settings.fwhm, settings.transition).amplitude;
  double prep_pi = 0.0;
  if (upper) {
    prep_pi = settings.prep_pi_amplitude
                  ? *settings.prep_pi_amplitude
                  : tune_amplitude(sim, ShapingProtocol::half_derivative(), kPi, settings.fwhm).amplitude;
  }

  auto gate = [&](double angle, double amplitude, double axis) {
    return sim.gate(settings.transition, angle, amplitude, settings.protocol, settings.fwhm, axis);
  };

  const std::vector<double> phis = phase_grid(settings.phi_points);
  const std::size_t per_n = phis.size();
  std::vector<FringeScan> fringes(settings.n_list.size());
  for (auto& f : fringes) {
    f.kind = FringeScan::Kind::Phase;
    f.abscissa = phis;
    f.p.assign(per_n, 0.0);
  }

  parallel_for(settings.n_list.size() * per_n, sim.workers(), [&](std::size_t k) {
    const std::size_t i = k / per_n;
    const std::size_t j = k % per_n;
    const int n = settings.n_list[i];
    std::vector<SequenceItem> items;
    if (upper) {
      items.push_back(sim.gate(Transition::k01, kPi, prep_pi, ShapingProtocol::half_derivative(), settings.fwhm));
    }
    items.push_back(gate(kPi / 2, half_pi, 0.0));
    for (int r = 0; r < n; ++r) {
      items.push_back(gate(kPi / 2, half_pi, 0.0));
      items.push_back(gate(-kPi / 2, -half_pi, 0.0));
    }
    items.push_back(gate(kPi / 2, half_pi, phis[j]));
    const ControlSequence seq = sim.schedule(items, settings.gap);
    const StateVector psi = sim.evolve(seq);
    double p = std::norm(psi(hi));
    if (settings.visibility_decay) {
      const double mixed = 0.5 * (std::norm(psi(lo)) + p);
      p = mixed + (p - mixed) * std::exp(-seq.duration() / *settings.visibility_decay);
    }
    if (settings.noise) p = sample_probability(p, *settings.noise, k);
    fringes[i].p[j] = p;
  });
  return analyze_ape(settings.n_list, std::move(fringes), settings.visibility_floor);
}

ApeResult run_ape_analytic(PhaseError eps, const std::vector<int>& n_list, int phi_points) {
  check_n_list(n_list);
  if (phi_points < 16) throw InvalidArgument("APE needs at least 16 phase points");
  const std::vector<double> phis = phase_grid(phi_points);
  const QubitGate z = z_phase(eps);
  const QubitGate first = corrupted_rotation(kPi / 2, eps);
  const QubitGate identity = pseudo_identity(kPi / 2, eps);
  std::vector<FringeScan> fringes;
  for (int n : n_list) {
    const Eigen::Vector2cd before = gate_power(identity, n) * first * Eigen::Vector2cd(1.0, 0.0);
    FringeScan scan{FringeScan::Kind::Phase, phis, {}};
    for (double phi : phis) {
      const Eigen::Vector2cd psi = z * rotation(phi, kPi / 2) * z * before;
      scan.p.push_back(std::norm(psi(1)));
    }
    fringes.push_back(std::move(scan));
  }
  return analyze_ape(n_list, std::move(fringes));
}

std::vector<LeakagePoint> leakage_scan(const Simulator& sim, const ShapingProtocol& protocol, double theta,
                                       const std::vector<double>& fwhm_list) {
  if (sim.params().dim < 3) throw InvalidArgument("leakage_scan: needs at least three levels");
  std::vector<LeakagePoint> out(fwhm_list.size());
  parallel_for(fwhm_list.size(), sim.workers(), [&](std::size_t i) {
    const double tau = fwhm_list[i];
    const double amplitude = tune_amplitude(sim, protocol, theta, tau).amplitude;
    const SequenceItem item = sim.gate(Transition::k01, theta, amplitude, protocol, tau);
    const StateVector psi = sim.evolve(sim.schedule(std::span(&item, 1)));
    out[i] = LeakagePoint{tau, std::norm(psi(2)), amplitude};
  });
  return out;
}

std::vector<double> default_filter_delays() {
  std::vector<double> d;
  for (int i = 0; i <= 40; ++i) d.push_back(0.25 * i);
  return d;
}

std::vector<FilterPoint> ramsey_error_filter(const Simulator& sim, const ShapingProtocol& protocol,
                                             const std::vector<double>& fwhm_list,
                                             const std::vector<double>& delays) {
  if (sim.params().dim < 3) throw InvalidArgument("ramsey_error_filter: needs at least three levels");
  if (delays.empty()) throw InvalidArgument("ramsey_error_filter: empty delay scan");
  std::vector<FilterPoint> out(fwhm_list.size());
  for (std::size_t i = 0; i < fwhm_list.size(); ++i) {
    const double tau = fwhm_list[i];
    const double amplitude = tune_amplitude(sim, protocol, kPi, tau).amplitude;
    const GateSpec pulse = sim.gate(Transition::k01, kPi, amplitude, protocol, tau);
    std::vector<double> p2(delays.size());
    parallel_for(delays.size(), sim.workers(), [&](std::size_t k) {
      const std::vector<SequenceItem> items{pulse, Idle{delays[k]}, pulse};
      p2[k] = std::norm(sim.evolve(sim.schedule(items))(2));
    });
    const auto [mn, mx] = std::minmax_element(p2.begin(), p2.end());
    out[i] = FilterPoint{tau, 0.25 * (*mn + *mx), *mn, *mx};
  }
  return out;
}

}  // namespace phaseq
