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

#include "phaseq/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "phaseq/error.hpp"
#include "phaseq/optimize.hpp"
#include "phaseq/parallel.hpp"

namespace phaseq {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kBracketHalfWidth = 0.2;  // relative to the area-theorem seed
constexpr double kBetaTolerance = 0.1 * kPi / 180.0;
constexpr double kMinF21Visibility = 0.05;

std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

// Population-weighted Bloch y of the (lower, upper) pair, in the transition's
// own frame.
double bloch_y(const Simulator& sim, const ControlSequence& seq, const StateVector& psi, Transition t) {
  const int lo = lower_level(t);
  const auto shift = frame_shift(sim.params().dim, sim.params().carrier_offset(t), seq.duration());
  const cplx a = psi(lo) * shift(lo);
  const cplx b = psi(lo + 1) * shift(lo + 1);
  return 2.0 * (std::conj(a) * b).imag();
}

double unwrap_to(double value, double reference) {
  return value - kTwoPi * std::round((value - reference) / kTwoPi);
}

}  // namespace

AmplitudeCalibration tune_amplitude(const Simulator& sim, const ShapingProtocol& protocol, double theta,
                                    double fwhm, Transition transition) {
  if (!(fwhm > 0.0)) throw InvalidArgument("tune_amplitude: fwhm must be positive");
  if (theta == 0.0) return AmplitudeCalibration{0.0, 0.0};
  const int lo = lower_level(transition);
  if (lo + 1 >= sim.params().dim) throw InvalidArgument("tune_amplitude: transition outside the qudit");

  const double seed = amplitude_for_angle(theta, fwhm) / ladder_coupling(transition);
  const bool pi_like = std::abs(std::abs(theta) - kPi) < 1e-9;
  const double target = std::pow(std::sin(theta / 2), 2);

  auto sequence = [&](double amplitude) {
    const SequenceItem item = sim.gate(transition, theta, amplitude, protocol, fwhm);
    return sim.schedule(std::span(&item, 1));
  };
  auto population = [&](double amplitude) {
    const StateVector psi = sim.evolve(sequence(amplitude), lo);
    return std::norm(psi(lo + 1));
  };
  auto objective = [&](double amplitude) {
    const double p = population(amplitude);
    return pi_like ? -p : (p - target) * (p - target);
  };

  double a = seed * (1.0 - kBracketHalfWidth);
  double b = seed * (1.0 + kBracketHalfWidth);
  if (a > b) std::swap(a, b);
  const ScalarMinimum best = golden_section_minimize(objective, a, b, 1e-9 * std::abs(seed));
  const double edge = 1e-6 * std::abs(seed);
  if (best.x - a < edge || b - best.x < edge) {
    throw FitError("tune_amplitude: optimum on the search bracket edge");
  }

  AmplitudeCalibration out;
  out.amplitude = best.x;
  const double p = population(best.x);
  out.residual = pi_like ? 1.0 - p : std::abs(p - target);
  if (!pi_like && std::abs(std::sin(theta)) > 0.1) {
    const ControlSequence seq = sequence(best.x);
    const double y = bloch_y(sim, seq, sim.evolve(seq, lo), transition);
    if (std::signbit(y) == std::signbit(-std::sin(theta))) {
      return out;
    }
    throw FitError("tune_amplitude: calibrated rotation has the wrong Bloch y sign");
  }
  return out;
}

namespace {

// The device as seen by a drive at f10 + detuning, with the frame locked to
// the drive.
Simulator drive_frame(const Simulator& sim, double detuning) {
  QuditParams p = sim.params();
  p.frame = p.f10 + detuning;
  return sim.with_params(p);
}

GateSpec frame_gate(double amplitude, const FrequencyTrackingOptions& options, double axis_phi) {
  GateSpec g;
  g.transition = Transition::k01;
  g.angle = kPi / 2;
  g.amplitude = amplitude;
  g.protocol = options.protocol;
  g.fwhm = options.fwhm;
  g.axis_phi = axis_phi;
  g.drive_detuning = 0.0;
  return g;
}

double ramsey_p1(const Simulator& s, double amplitude, const FrequencyTrackingOptions& options, double t,
                 double axis_phi) {
  const std::vector<SequenceItem> items{frame_gate(amplitude, options, 0.0), Idle{t},
                                        frame_gate(amplitude, options, axis_phi)};
  return std::norm(s.evolve(s.schedule(items))(1));
}

}  // namespace

FrequencyEstimate track_frequency(const Simulator& sim, double detuning_true, double t_max,
                                  const FrequencyTrackingOptions& options) {
  if (!(options.axis_advance > 0.0)) throw InvalidArgument("track_frequency: axis advance must be positive");
  if (!(t_max >= 2.0 / options.axis_advance)) {
    throw InvalidArgument("track_frequency: scan must cover at least two periods of the axis advance");
  }
  const Simulator s = drive_frame(sim, detuning_true);
  const double amplitude = options.half_pi_amplitude.value_or(amplitude_for_angle(kPi / 2, options.fwhm));

  FringeScan scan;
  scan.kind = FringeScan::Kind::Time;
  scan.abscissa = uniform_grid(0.0, t_max, options.t_step);
  scan.p.resize(scan.abscissa.size());
  parallel_for(scan.abscissa.size(), sim.workers(), [&](std::size_t i) {
    const double t = scan.abscissa[i];
    scan.p[i] = ramsey_p1(s, amplitude, options, t, -kTwoPi * options.axis_advance * t);
  });
  FrequencyEstimate est;
  est.fit = fit_fringe(scan);
  est.detuning = est.fit.frequency - options.axis_advance;
  return est;
}

std::vector<std::vector<double>> two_d_ramsey(const Simulator& sim, double detuning,
                                              const std::vector<double>& t_grid,
                                              const std::vector<double>& phi_grid,
                                              const FrequencyTrackingOptions& options) {
  if (t_grid.empty() || phi_grid.empty()) throw InvalidArgument("two_d_ramsey: grids must be non-empty");
  const Simulator s = drive_frame(sim, detuning);
  const double amplitude = options.half_pi_amplitude.value_or(amplitude_for_angle(kPi / 2, options.fwhm));
  std::vector<std::vector<double>> surface(t_grid.size(), std::vector<double>(phi_grid.size()));
  parallel_for(t_grid.size() * phi_grid.size(), sim.workers(), [&](std::size_t k) {
    const std::size_t i = k / phi_grid.size();
    const std::size_t j = k % phi_grid.size();
    surface[i][j] = ramsey_p1(s, amplitude, options, t_grid[i], phi_grid[j]);
  });
  return surface;
}

double ridge_slope(const std::vector<std::vector<double>>& surface, const std::vector<double>& t_grid,
                   const std::vector<double>& phi_grid) {
  if (surface.size() != t_grid.size() || t_grid.size() < 2) {
    throw InvalidArgument("ridge_slope: need at least two rows matching t_grid");
  }
  std::vector<double> phase(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    FringeScan scan{FringeScan::Kind::Phase, phi_grid, surface[i]};
    const double raw = fit_fringe(scan).phase_offset;
    phase[i] = i == 0 ? raw : unwrap_to(raw, phase[i - 1]);
  }
  double tm = 0.0, pm = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    tm += t_grid[i];
    pm += phase[i];
  }
  tm /= static_cast<double>(t_grid.size());
  pm /= static_cast<double>(t_grid.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    num += (t_grid[i] - tm) * (phase[i] - pm);
    den += (t_grid[i] - tm) * (t_grid[i] - tm);
  }
  return num / den;
}

double analytic_z_amplitude(double phase, double z_fwhm) {
  const double area_per_amplitude = z_fwhm * std::sqrt(kPi / (4.0 * std::numbers::ln2)) *
                                    truncated_area_fraction(kWindowHalfWidthInFwhm * z_fwhm, z_fwhm);
  return phase / (kTwoPi * area_per_amplitude);
}

ZCalibration calibrate_z(const Simulator& sim, const ZCalibrationOptions& options) {
  ZCalibration out;
  out.amp_grid = options.amp_grid;
  if (out.amp_grid.empty()) {
    for (int i = 0; i <= 80; ++i) out.amp_grid.push_back(0.005 * i);
  }
  const double amplitude = options.half_pi_amplitude.value_or(amplitude_for_angle(kPi / 2, options.fwhm));
  const double first_center = kWindowHalfWidthInFwhm * options.fwhm;

  out.p1.resize(out.amp_grid.size());
  parallel_for(out.amp_grid.size(), sim.workers(), [&](std::size_t i) {
    GateSpec g1 = sim.gate(Transition::k01, kPi / 2, amplitude, ShapingProtocol::half_derivative(), options.fwhm);
    g1.placement.center = first_center;
    GateSpec g2 = g1;
    g2.placement.center = first_center + options.t_fixed;
    ZPulseSpec z;
    z.amplitude = out.amp_grid[i];
    z.fwhm = options.z_fwhm;
    z.placement.center = first_center + 0.5 * options.t_fixed;
    z.placement.simultaneous = true;
    const std::vector<SequenceItem> items{g1, g2, z};
    out.p1[i] = std::norm(sim.evolve(sim.schedule(items))(1));
  });

  FringeScan scan{FringeScan::Kind::Time, out.amp_grid, out.p1};
  out.fit = fit_fringe(scan);
  // The accumulated phase is 2 pi f a, so the pi point follows from the
  // fringe period alone; the offset carries the pi/2 pulses' own phase error.
  const double a = 0.5 / out.fit.frequency;
  if (a > out.amp_grid.back()) throw FitError("calibrate_z: pi phase lies beyond the amplitude grid");
  out.z_pi_amplitude = a;
  out.analytic = analytic_z_amplitude(kPi, options.z_fwhm);
  return out;
}

F21Estimate measure_f21(const Simulator& sim, const F21Options& options) {
  const QuditParams& p = sim.params();
  if (p.dim < 3) throw InvalidArgument("measure_f21: needs at least three levels");
  if (options.drive_offsets.size() < 2) throw InvalidArgument("measure_f21: needs at least two drive offsets");

  const GateSpec prep = sim.gate(Transition::k01, kPi, amplitude_for_angle(kPi, options.prep_fwhm),
                                 ShapingProtocol::gaussian_only(), options.prep_fwhm);
  const double half_pi = amplitude_for_angle(kPi / 2, options.fwhm) / ladder_coupling(Transition::k12);
  const std::vector<double> t_grid = uniform_grid(0.0, options.t_max, options.t_step);

  F21Estimate est;
  std::vector<std::array<double, 2>> candidates;
  for (double offset : options.drive_offsets) {
    GateSpec g = sim.gate(Transition::k12, kPi / 2, half_pi, ShapingProtocol::gaussian_only(), options.fwhm);
    g.drive_detuning = p.f10 + offset - p.frame_frequency();
    FringeScan scan{FringeScan::Kind::Time, t_grid, std::vector<double>(t_grid.size())};
    parallel_for(t_grid.size(), sim.workers(), [&](std::size_t i) {
      const std::vector<SequenceItem> items{prep, g, Idle{t_grid[i]}, g};
      scan.p[i] = std::norm(sim.evolve(sim.schedule(items))(2));
    });
    FringeFit fit;
    try {
      fit = fit_fringe(scan);
    } catch (const FitError& e) {
      throw FitError(std::string("measure_f21: no 1<->2 fringe at this drive (") + e.what() + ")");
    }
    // A drive on resonance with f21 leaves P2 flat.
    if (fit.amplitude < kMinF21Visibility) {
      throw FitError("measure_f21: no 1<->2 oscillation at drive offset " + std::to_string(offset) +
                     " GHz (degenerate detuning)");
    }
    est.fits.push_back(fit);
    candidates.push_back({offset - fit.frequency, offset + fit.frequency});
  }

  double best_spread = std::numeric_limits<double>::infinity();
  for (double c : candidates.front()) {
    double spread = 0.0;
    double sum = c;
    for (std::size_t k = 1; k < candidates.size(); ++k) {
      const double d0 = std::abs(candidates[k][0] - c);
      const double d1 = std::abs(candidates[k][1] - c);
      spread = std::max(spread, std::min(d0, d1));
      sum += d0 < d1 ? candidates[k][0] : candidates[k][1];
    }
    if (spread < best_spread) {
      best_spread = spread;
      est.anharmonicity = sum / static_cast<double>(candidates.size());
    }
  }
  est.spread = best_spread;
  est.f21 = p.f10 + est.anharmonicity;
  return est;
}

PhaseError beta_phase_error(const Simulator& sim, double beta, double theta, double fwhm, double amplitude) {
  const SequenceItem item =
      sim.gate(Transition::k01, theta, amplitude, ShapingProtocol::derivative_scaled(beta), fwhm);
  const ControlSequence seq = sim.schedule(std::span(&item, 1));
  return effective_gate(sim.params(), seq, sim.config(), Transition::k01, &sim.cache()).epsilon();
}

BetaOptimum optimize_beta(const Simulator& sim, double theta, double fwhm, double beta_lo, double beta_hi,
                          std::optional<double> amplitude) {
  if (sim.params().dim < 3) throw InvalidArgument("optimize_beta: needs at least three levels");
  BetaOptimum out;
  out.amplitude = amplitude ? *amplitude
                            : tune_amplitude(sim, ShapingProtocol::half_derivative(), theta, fwhm).amplitude;
  auto eps = [&](double beta) { return beta_phase_error(sim, beta, theta, fwhm, out.amplitude).rad; };
  out.beta = bisect_root(eps, beta_lo, beta_hi, 1e-7);
  out.epsilon = PhaseError{eps(out.beta)};
  if (!(std::abs(out.epsilon.rad) < kBetaTolerance)) {
    throw FitError("optimize_beta: root does not null the phase error");
  }
  return out;
}

nlohmann::json to_json(const CalibrationRecord& r) {
  return nlohmann::json{
      {"pi_amplitude", r.pi_amplitude},       {"pi_residual", r.pi_residual},
      {"half_pi_amplitude", r.half_pi_amplitude}, {"half_pi_residual", r.half_pi_residual},
      {"half_pi_check", r.half_pi_check},     {"f10_est", r.f10_est},
      {"f10_residual", r.f10_residual},       {"f21_est", r.f21_est},
      {"f21_residual", r.f21_residual},       {"anharmonicity_est", r.anharmonicity()},
      {"z_pi_amplitude", r.z_pi_amplitude},   {"z_pi_residual", r.z_pi_residual},
      {"beta_star", r.beta_star},             {"beta_residual", r.beta_residual},
      {"fwhm", r.fwhm},                       {"protocol", r.protocol},
      {"config_hash", r.config_hash},
      {"tool_version", r.tool_version},
  };
}

CalibrationRecord calibration_record_from_json(const nlohmann::json& j) {
  try {
    CalibrationRecord r;
    r.pi_amplitude = j.at("pi_amplitude").get<double>();
    r.pi_residual = j.at("pi_residual").get<double>();
    r.half_pi_amplitude = j.at("half_pi_amplitude").get<double>();
    r.half_pi_residual = j.at("half_pi_residual").get<double>();
    r.half_pi_check = j.at("half_pi_check").get<double>();
    r.f10_est = j.at("f10_est").get<double>();
    r.f10_residual = j.at("f10_residual").get<double>();
    r.f21_est = j.at("f21_est").get<double>();
    r.f21_residual = j.at("f21_residual").get<double>();
    r.z_pi_amplitude = j.at("z_pi_amplitude").get<double>();
    r.z_pi_residual = j.at("z_pi_residual").get<double>();
    r.beta_star = j.at("beta_star").get<double>();
    r.beta_residual = j.at("beta_residual").get<double>();
    r.fwhm = j.at("fwhm").get<double>();
    r.protocol = j.value("protocol", "hd");
    r.config_hash = j.value("config_hash", "");
    r.tool_version = j.value("tool_version", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("calibration record: ") + e.what());
  }
}

}  // namespace phaseq
