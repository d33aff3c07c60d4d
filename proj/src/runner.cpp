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

#include "phaseq/runner.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "phaseq/error.hpp"
#include "phaseq/metrology.hpp"
#include "phaseq/parallel.hpp"
#include "phaseq/simulator.hpp"
#include "phaseq/version.hpp"

namespace phaseq {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;

// Exact JSON kinds for config values; get<T>() alone would wrap negative
// numbers into unsigned fields and truncate fractions.
bool has_kind(const json& v, const double*) { return v.is_number(); }
bool has_kind(const json& v, const bool*) { return v.is_boolean(); }
bool has_kind(const json& v, const std::string*) { return v.is_string(); }
bool has_kind(const json& v, const std::uint64_t*) { return v.is_number_unsigned(); }
bool has_kind(const json& v, const int*) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>() <= static_cast<std::uint64_t>(INT_MAX);
  if (!v.is_number_integer()) return false;
  const std::int64_t x = v.get<std::int64_t>();
  return x >= INT_MIN && x <= INT_MAX;
}
template <class T>
bool has_kind(const json& v, const std::vector<T>*) {
  return v.is_array() && std::all_of(v.begin(), v.end(), [](const json& e) { return has_kind(e, (const T*)nullptr); });
}
template <class T, std::size_t N>
bool has_kind(const json& v, const std::array<T, N>*) {
  return v.is_array() && v.size() == N && has_kind(v, (const std::vector<T>*)nullptr);
}

// Reads one JSON object, remembering which keys were consumed so the rest
// can be reported as unknown.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!has_kind(*it, (const T*)nullptr)) throw ConfigError(where(key) + ": wrong type (" + it->dump() + ")");
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  template <class T>
  void get_optional(const char* key, std::optional<T>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    if (!has_kind(*it, (const T*)nullptr)) throw ConfigError(where(key) + ": wrong type (" + it->dump() + ")");
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  std::optional<Block> child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Block(*it, where(key));
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown config key '" + where(item.key()) + "'");
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

ShapingProtocol parse_protocol(const std::string& text, const std::string& where) {
  try {
    return ShapingProtocol::parse(text);
  } catch (const InvalidArgument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Collects CSV rows and writes them in one go after aggregation.
class CsvWriter {
 public:
  CsvWriter(std::vector<std::string> header, const std::string& hash) : header_(std::move(header)), hash_(hash) {}

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw InvalidArgument("csv row width does not match header");
    rows_.push_back(cells);
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot write " + path.string());
    os << "# phaseq " << kToolVersion << " config_hash=" << hash_ << "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << "\n";
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    if (!os) throw IoError("write failed for " + path.string());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  std::string hash_;
};

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << "\n";
  if (!os) throw IoError("write failed for " + path.string());
}

json stamp(const ExperimentConfig& c) {
  return json{{"tool_version", kToolVersion}, {"config_hash", config_hash(c)}};
}

Simulator make_simulator(const ExperimentConfig& c, int workers) {
  return Simulator(c.device, c.integrator, workers);
}

// Amplitude from the calibration record when it was tuned for the same
// protocol and width; tuned here otherwise.
double pi_amplitude(const Simulator& sim, const ExperimentConfig& c, const RunOptions& o,
                    const ShapingProtocol& protocol, double theta) {
  if (o.calibration && o.calibration->protocol == protocol.name() &&
      std::abs(o.calibration->fwhm - c.pulses.fwhm) < 1e-12) {
    if (std::abs(theta - kPi) < 1e-12) return o.calibration->pi_amplitude;
    if (std::abs(theta - kPi / 2) < 1e-12) return o.calibration->half_pi_amplitude;
  }
  return tune_amplitude(sim, protocol, theta, c.pulses.fwhm).amplitude;
}

json vec_json(const std::vector<double>& v, double scale = 1.0) {
  json a = json::array();
  for (double x : v) a.push_back(x * scale);
  return a;
}

// ---------------------------------------------------------------- ape

json cmd_ape(const ExperimentConfig& c, const RunOptions& o) {
  const std::string hash = config_hash(c);
  const Simulator sim = make_simulator(c, o.workers);
  if (c.ape.transition == Transition::k12 && c.device.dim < 3) {
    throw ConfigError("ape: the 1<->2 transition needs device.dim >= 3");
  }
  CsvWriter fringes({"protocol", "n", "phi_deg", "p_upper"}, hash);
  json summary = stamp(c);
  summary["transition"] = to_string(c.ape.transition);
  summary["fwhm_ns"] = c.pulses.fwhm;
  json per = json::object();
  std::optional<double> eps_gauss, eps_hd;
  for (const ShapingProtocol& protocol : c.ape.protocols) {
    ApeSettings s;
    s.protocol = protocol;
    s.fwhm = c.pulses.fwhm;
    s.transition = c.ape.transition;
    s.n_list = c.ape.n_list;
    s.phi_points = c.ape.phi_points;
    s.visibility_floor = c.ape.visibility_floor;
    s.visibility_decay = c.ape.visibility_decay;
    if (c.noise.enabled) s.noise = ShotNoise{c.noise.shots, c.seed};
    if (c.ape.transition == Transition::k01) s.half_pi_amplitude = pi_amplitude(sim, c, o, protocol, kPi / 2);
    const ApeResult r = run_ape(sim, s);
    for (std::size_t k = 0; k < r.fringes.size(); ++k) {
      const FringeScan& f = r.fringes[k];
      for (std::size_t i = 0; i < f.abscissa.size(); ++i) {
        fringes.row({protocol.name(), std::to_string(r.fringe_n[k]), format_double(f.abscissa[i] * kDeg),
                     format_double(f.p[i])});
      }
    }
    json entry{
        {"n", r.n_list},
        {"shift_rad", vec_json(r.shifts)},
        {"shift_deg", vec_json(r.shifts, kDeg)},
        {"visibility", vec_json(r.visibilities)},
        {"rejected_n", r.rejected},
        {"epsilon_per_gate_rad", r.epsilon_per_gate},
        {"epsilon_per_gate_deg", r.epsilon_per_gate * kDeg},
        {"epsilon_2n_plus_1_rad", r.odd_count_estimate},
        {"epsilon_2n_plus_1_deg", r.odd_count_estimate * kDeg},
        {"linearity_residual", r.linearity_residual},
    };
    if (s.half_pi_amplitude) entry["half_pi_amplitude"] = *s.half_pi_amplitude;
    per[protocol.name()] = entry;
    if (protocol.kind() == ShapingProtocol::Kind::GaussianOnly) eps_gauss = r.epsilon_per_gate;
    if (protocol.kind() == ShapingProtocol::Kind::HalfDerivative) eps_hd = r.epsilon_per_gate;
  }
  summary["protocols"] = per;
  if (eps_gauss && eps_hd && std::abs(*eps_gauss) > 0.0) {
    summary["hd_over_gaussian"] = std::abs(*eps_hd) / std::abs(*eps_gauss);
  }
  fringes.write(o.out_dir / "fringes.csv");
  return summary;
}

// ------------------------------------------------------------ leakage

// t_ns, P0..P(d-1), then Re/Im of every amplitude, sampled about every
// 0.1 ns.
void write_state_trajectory(const Simulator& sim, const ExperimentConfig& c, const ShapingProtocol& protocol,
                      const std::string& hash, const std::filesystem::path& path) {
  const int d = c.device.dim;
  const double a = tune_amplitude(sim, protocol, kPi, c.pulses.fwhm).amplitude;
  const SequenceItem item = sim.gate(Transition::k01, kPi, a, protocol, c.pulses.fwhm);
  PropagatorConfig cfg = sim.config();
  cfg.sample_every = std::max(1, static_cast<int>(std::lround(0.1 / cfg.dt)));
  const Trajectory tr = propagate(c.device, sim.schedule(std::span(&item, 1)), cfg, basis_state(d, 0));
  std::vector<std::string> header{"t_ns"};
  for (int n = 0; n < d; ++n) header.push_back("P" + std::to_string(n));
  for (int n = 0; n < d; ++n) {
    header.push_back("re" + std::to_string(n));
    header.push_back("im" + std::to_string(n));
  }
  CsvWriter out(header, hash);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const StateVector& s = tr.states[k];
    std::vector<std::string> row{format_double(tr.times[k])};
    for (int n = 0; n < d; ++n) row.push_back(format_double(std::norm(s(n))));
    for (int n = 0; n < d; ++n) {
      row.push_back(format_double(s(n).real()));
      row.push_back(format_double(s(n).imag()));
    }
    out.row(row);
  }
  out.write(path);
}

json cmd_leakage(const ExperimentConfig& c, const RunOptions& o) {
  if (c.device.dim < 3) throw ConfigError("leakage: needs device.dim >= 3 (no |2> to leak into)");
  const std::string hash = config_hash(c);
  const Simulator sim = make_simulator(c, o.workers);
  const auto& widths = c.leakage.fwhm_list;
  const auto g = leakage_scan(sim, ShapingProtocol::gaussian_only(), kPi, widths);
  const auto h = leakage_scan(sim, ShapingProtocol::half_derivative(), kPi, widths);
  const std::vector<double> delays = c.leakage.delays.empty() ? default_filter_delays() : c.leakage.delays;
  const auto rg = ramsey_error_filter(sim, ShapingProtocol::gaussian_only(), widths, delays);
  const auto rh = ramsey_error_filter(sim, ShapingProtocol::half_derivative(), widths, delays);

  CsvWriter leak({"tau_ns", "P2_gaussian", "P2_hd"}, hash);
  CsvWriter ref({"tau_ns", "REF_gaussian", "REF_hd", "REF_min_gaussian", "REF_max_gaussian", "REF_min_hd",
                 "REF_max_hd"},
                hash);
  json ratio = json::array();
  bool monotone_g = true, monotone_h = true;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    leak.row({format_double(widths[i]), format_double(g[i].p2), format_double(h[i].p2)});
    ref.row({format_double(widths[i]), format_double(rg[i].p2_error), format_double(rh[i].p2_error),
             format_double(rg[i].p2_min), format_double(rg[i].p2_max), format_double(rh[i].p2_min),
             format_double(rh[i].p2_max)});
    ratio.push_back(h[i].p2 > 0.0 ? g[i].p2 / h[i].p2 : std::numeric_limits<double>::infinity());
    if (i > 0 && widths[i] > widths[i - 1]) {
      monotone_g = monotone_g && g[i].p2 <= g[i - 1].p2;
      monotone_h = monotone_h && h[i].p2 <= h[i - 1].p2;
    }
  }
  leak.write(o.out_dir / "leakage.csv");
  ref.write(o.out_dir / "ref.csv");
  json summary = stamp(c);
  if (c.leakage.trajectories) {
    json files = json::array();
    for (const ShapingProtocol& protocol : {ShapingProtocol::gaussian_only(), ShapingProtocol::half_derivative()}) {
      const std::string name = "trajectory_" + protocol.name() + ".csv";
      write_state_trajectory(sim, c, protocol, hash, o.out_dir / name);
      files.push_back(name);
    }
    summary["trajectory_files"] = files;
  }
  summary["tau_ns"] = widths;
  summary["p2_gaussian"] = json::array();
  summary["p2_hd"] = json::array();
  for (std::size_t i = 0; i < widths.size(); ++i) {
    summary["p2_gaussian"].push_back(g[i].p2);
    summary["p2_hd"].push_back(h[i].p2);
  }
  summary["gaussian_over_hd"] = ratio;
  summary["monotone_gaussian"] = monotone_g;
  summary["monotone_hd"] = monotone_h;
  return summary;
}

// ---------------------------------------------------------- calibrate

template <class F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    const std::string what = std::string("calibrate: stage '") + name + "' failed: " + e.what();
    switch (e.kind()) {
      case ErrorKind::Fit:
        throw FitError(what);
      case ErrorKind::Config:
        throw ConfigError(what);
      case ErrorKind::Io:
        throw IoError(what);
      case ErrorKind::InvalidArgument:
        throw InvalidArgument(what);
    }
    throw;
  }
}

json cmd_calibrate(const ExperimentConfig& c, const RunOptions& o) {
  const Simulator sim = make_simulator(c, o.workers);
  const CalibrateBlock& b = c.calibrate;
  const ShapingProtocol& protocol = c.pulses.protocol;
  CalibrationRecord r;
  r.fwhm = c.pulses.fwhm;
  r.protocol = protocol.name();
  r.config_hash = config_hash(c);
  r.tool_version = kToolVersion;

  const auto pi = stage("amplitude", [&] { return tune_amplitude(sim, protocol, kPi, r.fwhm); });
  const auto half = stage("amplitude", [&] { return tune_amplitude(sim, protocol, kPi / 2, r.fwhm); });
  r.pi_amplitude = pi.amplitude;
  r.pi_residual = pi.residual;
  r.half_pi_amplitude = half.amplitude;
  r.half_pi_residual = half.residual;
  r.half_pi_check = std::abs(half.amplitude - 0.5 * pi.amplitude) / (0.5 * pi.amplitude);

  FrequencyTrackingOptions track;
  track.axis_advance = b.axis_advance;
  track.t_step = b.track_t_step;
  track.fwhm = r.fwhm;
  track.protocol = protocol;
  track.half_pi_amplitude = half.amplitude;
  const FrequencyEstimate fe =
      stage("frequency", [&] { return track_frequency(sim, b.injected_detuning, b.track_t_max, track); });
  const double f_drive = c.device.f10 + b.injected_detuning;
  r.f10_est = f_drive - fe.detuning;
  r.f10_residual = fe.fit.rms_residual;

  std::optional<F21Estimate> f21;
  if (c.device.dim >= 3) {
    F21Options fo;
    fo.drive_offsets = b.f21_offsets;
    fo.prep_fwhm = b.f21_prep_fwhm;
    fo.fwhm = r.fwhm;
    fo.t_max = b.f21_t_max;
    fo.t_step = b.f21_t_step;
    f21 = stage("f21", [&] { return measure_f21(sim, fo); });
    r.f21_est = f21->f21;
    r.f21_residual = f21->spread;
  }

  ZCalibrationOptions zo;
  zo.t_fixed = b.z_t_fixed;
  zo.z_fwhm = b.z_fwhm;
  zo.fwhm = r.fwhm;
  zo.amp_grid = b.z_amp_grid;
  zo.half_pi_amplitude = protocol == ShapingProtocol::half_derivative()
                             ? half.amplitude
                             : stage("z", [&] {
                                 return tune_amplitude(sim, ShapingProtocol::half_derivative(), kPi / 2, r.fwhm);
                               }).amplitude;
  const ZCalibration z = stage("z", [&] { return calibrate_z(sim, zo); });
  r.z_pi_amplitude = z.z_pi_amplitude;
  r.z_pi_residual = z.fit.rms_residual;

  std::optional<BetaOptimum> beta;
  if (c.device.dim >= 3) {
    beta = stage("beta", [&] { return optimize_beta(sim, kPi / 2, r.fwhm, b.beta_bracket[0], b.beta_bracket[1]); });
    r.beta_star = beta->beta;
    r.beta_residual = std::abs(beta->epsilon.rad);
  }

  write_json(o.out_dir / "calibration.json", to_json(r));

  json summary = stamp(c);
  summary["record"] = to_json(r);
  summary["injected_detuning_ghz"] = b.injected_detuning;
  summary["estimated_detuning_ghz"] = fe.detuning;
  summary["f10_error_ghz"] = r.f10_est - c.device.f10;
  summary["z_pi_analytic"] = z.analytic;
  summary["z_pi_relative_error"] = std::abs(z.z_pi_amplitude - z.analytic) / z.analytic;
  if (f21) summary["anharmonicity_error_ghz"] = f21->anharmonicity - c.device.anharmonicity;
  if (beta) {
    summary["beta_epsilon_deg"] = beta->epsilon.rad * kDeg;
  }
  json thresholds{
      {"half_pi_check", 0.01},
      {"fringe_rms", 0.01},
      {"beta_epsilon_deg", 0.1},
      {"f21_spread_ghz", 0.001},
  };
  summary["thresholds"] = thresholds;
  bool ok = r.half_pi_check < 0.01 && r.f10_residual < 0.01 && r.z_pi_residual < 0.01;
  if (f21) ok = ok && r.f21_residual < 0.001;
  if (beta) ok = ok && std::abs(beta->epsilon.rad * kDeg) < 0.1;
  summary["within_thresholds"] = ok;
  if (o.calibration) {
    summary["pi_amplitude_change"] =
        std::abs(r.pi_amplitude - o.calibration->pi_amplitude) / o.calibration->pi_amplitude;
  }
  return summary;
}

// --------------------------------------------------------- tomography

void write_trajectory(const TrajectoryScan& scan, const std::vector<double>& s, const std::string& hash,
                      const std::filesystem::path& path) {
  CsvWriter w({"s", "x", "y", "z", "leakage"}, hash);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const BlochVector& b = scan.bloch[i];
    w.row({format_double(s[i]), format_double(b.x), format_double(b.y), format_double(b.z),
           format_double(scan.leakage[i])});
  }
  w.write(path);
}

json cmd_tomography(const ExperimentConfig& c, const RunOptions& o) {
  const std::string hash = config_hash(c);
  const Simulator sim = make_simulator(c, o.workers);
  QstSettings qs;
  qs.mode = c.tomography.mode;
  qs.fwhm = c.pulses.fwhm;
  qs.protocol = ShapingProtocol::half_derivative();
  if (qs.mode == PreRotationMode::Simulated) {
    qs.half_pi_amplitude = pi_amplitude(sim, c, o, qs.protocol, kPi / 2);
  }
  // Each trajectory draws from its own seed.
  std::uint64_t salt = 0;
  auto noisy = [&] {
    QstSettings s = qs;
    if (c.noise.enabled) s.noise = ShotNoise{c.noise.shots, c.seed + salt};
    ++salt;
    return s;
  };

  json summary = stamp(c);
  const std::vector<double> s_x = linspace(0.0, 1.0, c.tomography.theta_points);
  std::vector<double> thetas;
  for (double s : s_x) thetas.push_back(s * kPi);
  json xr = json::object();
  double hd_pi = 0.0;
  for (const ShapingProtocol& protocol : {ShapingProtocol::gaussian_only(), ShapingProtocol::half_derivative()}) {
    const double a_pi = pi_amplitude(sim, c, o, protocol, kPi);
    if (protocol == ShapingProtocol::half_derivative()) hd_pi = a_pi;
    const TrajectoryScan scan = x_rotation_trajectory(sim, protocol, c.pulses.fwhm, thetas, a_pi, noisy());
    write_trajectory(scan, s_x, hash, o.out_dir / ("trajectory_x_" + protocol.name() + ".csv"));
    double max_x = 0.0, max_leak = 0.0;
    for (std::size_t i = 0; i < scan.bloch.size(); ++i) {
      max_x = std::max(max_x, std::abs(scan.bloch[i].x));
      max_leak = std::max(max_leak, scan.leakage[i]);
    }
    xr[protocol.name()] = json{{"pi_amplitude", a_pi},
                               {"max_abs_x", max_x},
                               {"final_z", scan.bloch.back().z},
                               {"max_leakage", max_leak}};
  }
  summary["x_rotation"] = xr;

  const double z_pi =
      o.calibration ? o.calibration->z_pi_amplitude
                    : calibrate_z(sim, [&] {
                        ZCalibrationOptions zo;
                        zo.t_fixed = c.calibrate.z_t_fixed;
                        zo.z_fwhm = c.pulses.fwhm;
                        zo.fwhm = c.pulses.fwhm;
                        zo.amp_grid = c.calibrate.z_amp_grid;
                        zo.half_pi_amplitude = pi_amplitude(sim, c, o, ShapingProtocol::half_derivative(), kPi / 2);
                        return zo;
                      }()).z_pi_amplitude;
  const HadamardPulses nominal = HadamardPulses::nominal(hd_pi, z_pi, c.pulses.fwhm);
  const HadamardPulses pulses = c.tomography.tune_hadamard ? tune_hadamard(sim, nominal, qs) : nominal;
  const std::vector<double> s_h = linspace(0.0, 2.0, c.tomography.s_points);
  const TrajectoryScan h = hadamard_trajectory(sim, pulses, s_h, noisy());
  write_trajectory(h, s_h, hash, o.out_dir / "trajectory_hadamard.csv");
  const BlochVector at1 = qst(sim, hadamard_items(sim, pulses, 1.0), qs).bloch;
  const BlochVector at2 = qst(sim, hadamard_items(sim, pulses, 2.0), qs).bloch;
  summary["hadamard"] = json{
      {"tuned", c.tomography.tune_hadamard},
      {"x_amplitude", pulses.x_amplitude},
      {"z_amplitude", pulses.z_amplitude},
      {"x_scale", pulses.x_amplitude / nominal.x_amplitude},
      {"z_scale", pulses.z_amplitude / nominal.z_amplitude},
      {"fidelity_plus_at_s1", bloch_fidelity(at1, BlochVector{1, 0, 0})},
      {"fidelity_zero_at_s2", bloch_fidelity(at2, BlochVector{0, 0, 1})},
  };
  return summary;
}

// -------------------------------------------------------------- sweep

double sweep_output(const std::string& name, const ExperimentConfig& c) {
  const Simulator sim = make_simulator(c, 1);
  const ShapingProtocol& protocol = c.pulses.protocol;
  const double theta = c.sweep.theta_deg / kDeg;
  if (name == "amplitude") return tune_amplitude(sim, protocol, theta, c.pulses.fwhm).amplitude;
  if (name == "epsilon_deg" || name == "epsilon_rad" || name == "gate_leakage") {
    const double a = tune_amplitude(sim, protocol, theta, c.pulses.fwhm).amplitude;
    const SequenceItem item = sim.gate(Transition::k01, theta, a, protocol, c.pulses.fwhm);
    const EffectiveGate g =
        effective_gate(c.device, sim.schedule(std::span(&item, 1)), c.integrator, Transition::k01, &sim.cache());
    if (name == "gate_leakage") return g.leakage;
    return name == "epsilon_deg" ? g.fit.epsilon.rad * kDeg : g.fit.epsilon.rad;
  }
  if (name == "leakage") {
    if (c.device.dim < 3) throw ConfigError("sweep: output 'leakage' needs device.dim >= 3");
    return leakage_scan(sim, protocol, theta, {c.pulses.fwhm}).front().p2;
  }
  if (name == "ape_epsilon_deg") {
    ApeSettings s;
    s.protocol = protocol;
    s.fwhm = c.pulses.fwhm;
    s.n_list = c.ape.n_list;
    s.phi_points = c.ape.phi_points;
    return run_ape(sim, s).epsilon_per_gate * kDeg;
  }
  throw ConfigError("sweep: unknown output '" + name + "'");
}

json cmd_sweep(const ExperimentConfig& c, const RunOptions& o) {
  const SweepBlock& sw = c.sweep;
  require(!sw.path.empty(), "sweep.path is required");
  require(!sw.values.empty(), "sweep.values must not be empty");
  require(!sw.outputs.empty(), "sweep.outputs must not be empty");
  for (const auto& out : sw.outputs) {
    const auto& known = sweep_outputs();
    require(std::find(known.begin(), known.end(), out) != known.end(), "sweep: unknown output '" + out + "'");
  }
  const json base = to_json(c);
  json::json_pointer ptr;
  try {
    std::string p;
    std::stringstream ss(sw.path);
    std::string part;
    while (std::getline(ss, part, '.')) p += "/" + part;
    ptr = json::json_pointer(p);
  } catch (const json::exception& e) {
    throw ConfigError("sweep.path: " + std::string(e.what()));
  }
  require(base.contains(ptr) && (base.at(ptr).is_number() || base.at(ptr).is_null()),
          "sweep.path '" + sw.path + "' does not name a numeric config entry");
  require(sw.path.rfind("sweep.", 0) != 0, "sweep.path cannot point into the sweep block");

  std::vector<ExperimentConfig> points;
  for (double v : sw.values) {
    json j = base;
    j[ptr] = v;
    points.push_back(parse_config(j));
  }
  std::vector<std::vector<double>> results(points.size());
  parallel_for(points.size(), o.workers, [&](std::size_t i) {
    for (const auto& out : sw.outputs) results[i].push_back(sweep_output(out, points[i]));
  });

  std::vector<std::string> header{sw.path};
  header.insert(header.end(), sw.outputs.begin(), sw.outputs.end());
  CsvWriter w(header, config_hash(c));
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<std::string> row{format_double(sw.values[i])};
    for (double r : results[i]) row.push_back(format_double(r));
    w.row(row);
  }
  w.write(o.out_dir / "sweep.csv");

  json summary = stamp(c);
  summary["path"] = sw.path;
  summary["values"] = sw.values;
  json cols = json::object();
  for (std::size_t k = 0; k < sw.outputs.size(); ++k) {
    json col = json::array();
    int crossings = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      col.push_back(results[i][k]);
      if (i > 0 && std::signbit(results[i][k]) != std::signbit(results[i - 1][k])) ++crossings;
    }
    cols[sw.outputs[k]] = json{{"values", col}, {"sign_changes", crossings}};
  }
  summary["outputs"] = cols;
  return summary;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  Block root(j, "");
  if (auto b = root.child("device")) {
    b->get("dim", c.device.dim);
    b->get("f10", c.device.f10);
    b->get("anharmonicity", c.device.anharmonicity);
    b->get_optional("frame", c.device.frame);
    b->finish();
  }
  try {
    c.device.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("device: ") + e.what());
  }
  require(c.device.dim <= 8, "device.dim must be at most 8");

  if (auto b = root.child("pulses")) {
    b->get("fwhm", c.pulses.fwhm);
    std::string name = c.pulses.protocol.name();
    b->get("protocol", name);
    c.pulses.protocol = parse_protocol(name, "pulses.protocol");
    std::optional<double> beta;
    b->get_optional("beta", beta);
    if (beta) {
      require(std::isfinite(*beta), "pulses.beta must be finite");
      c.pulses.protocol = ShapingProtocol::derivative_scaled(*beta);
    }
    b->finish();
  }
  require(c.pulses.fwhm > 0.0 && std::isfinite(c.pulses.fwhm), "pulses.fwhm must be positive");

  if (auto b = root.child("integrator")) {
    b->get("dt", c.integrator.dt);
    b->get("rwa", c.integrator.rotating_wave);
    b->finish();
  }
  require(c.integrator.dt > 0.0 && c.integrator.dt <= 0.1, "integrator.dt must be in (0, 0.1] ns");

  if (auto b = root.child("noise")) {
    b->get("enabled", c.noise.enabled);
    b->get("shots", c.noise.shots);
    b->finish();
  }
  require(c.noise.shots > 0, "noise.shots must be positive");
  root.get("seed", c.seed);

  if (auto b = root.child("ape")) {
    std::string t = to_string(c.ape.transition);
    b->get("transition", t);
    try {
      c.ape.transition = parse_transition(t);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("ape.transition: ") + e.what());
    }
    b->get("n_list", c.ape.n_list);
    b->get("phi_points", c.ape.phi_points);
    std::vector<std::string> names;
    for (const auto& p : c.ape.protocols) names.push_back(p.name());
    b->get("protocols", names);
    c.ape.protocols.clear();
    for (const auto& n : names) c.ape.protocols.push_back(parse_protocol(n, "ape.protocols"));
    b->get("visibility_floor", c.ape.visibility_floor);
    b->get_optional("visibility_decay", c.ape.visibility_decay);
    b->finish();
  }
  require(!c.ape.n_list.empty(), "ape.n_list must not be empty");
  require(std::find(c.ape.n_list.begin(), c.ape.n_list.end(), 0) != c.ape.n_list.end(), "ape.n_list must contain 0");
  for (int n : c.ape.n_list) require(n >= 0 && n <= 1000, "ape.n_list entries must be in [0, 1000]");
  require(c.ape.phi_points >= 16, "ape.phi_points must be at least 16");
  require(!c.ape.protocols.empty(), "ape.protocols must not be empty");
  require(!c.ape.visibility_decay || *c.ape.visibility_decay > 0.0, "ape.visibility_decay must be positive");

  if (auto b = root.child("leakage")) {
    b->get("fwhm_list", c.leakage.fwhm_list);
    b->get("delays", c.leakage.delays);
    b->get("trajectories", c.leakage.trajectories);
    b->finish();
  }
  require(!c.leakage.fwhm_list.empty(), "leakage.fwhm_list must not be empty");
  for (double w : c.leakage.fwhm_list) require(w > 0.0, "leakage.fwhm_list entries must be positive");
  for (double d : c.leakage.delays) require(d >= 0.0, "leakage.delays entries must be non-negative");

  if (auto b = root.child("calibrate")) {
    CalibrateBlock& k = c.calibrate;
    b->get("injected_detuning", k.injected_detuning);
    b->get("track_t_max", k.track_t_max);
    b->get("track_t_step", k.track_t_step);
    b->get("axis_advance", k.axis_advance);
    b->get("f21_offsets", k.f21_offsets);
    b->get("f21_t_max", k.f21_t_max);
    b->get("f21_t_step", k.f21_t_step);
    b->get("f21_prep_fwhm", k.f21_prep_fwhm);
    b->get("z_t_fixed", k.z_t_fixed);
    b->get("z_fwhm", k.z_fwhm);
    b->get("z_amp_grid", k.z_amp_grid);
    b->get("beta_bracket", k.beta_bracket);
    b->finish();
  }
  require(c.calibrate.track_t_step > 0.0 && c.calibrate.f21_t_step > 0.0, "calibrate time steps must be positive");
  require(c.calibrate.axis_advance > 0.0, "calibrate.axis_advance must be positive");
  require(c.calibrate.beta_bracket[0] < c.calibrate.beta_bracket[1], "calibrate.beta_bracket must be increasing");

  if (auto b = root.child("tomography")) {
    b->get("theta_points", c.tomography.theta_points);
    b->get("s_points", c.tomography.s_points);
    std::string mode = c.tomography.mode == PreRotationMode::Ideal ? "ideal" : "simulated";
    b->get("mode", mode);
    require(mode == "ideal" || mode == "simulated", "tomography.mode must be 'ideal' or 'simulated'");
    c.tomography.mode = mode == "ideal" ? PreRotationMode::Ideal : PreRotationMode::Simulated;
    b->get("tune_hadamard", c.tomography.tune_hadamard);
    b->finish();
  }
  require(c.tomography.theta_points >= 2 && c.tomography.s_points >= 2, "tomography grids need at least 2 points");

  if (auto b = root.child("sweep")) {
    b->get("path", c.sweep.path);
    b->get("values", c.sweep.values);
    b->get("outputs", c.sweep.outputs);
    b->get("theta_deg", c.sweep.theta_deg);
    b->finish();
  }
  if (auto b = root.child("output")) {
    b->get("dir", c.output_dir);
    b->finish();
  }
  root.finish();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["device"] = json{{"dim", c.device.dim},
                     {"f10", c.device.f10},
                     {"anharmonicity", c.device.anharmonicity},
                     {"frame", c.device.frame ? json(*c.device.frame) : json(nullptr)}};
  j["pulses"] = json{{"fwhm", c.pulses.fwhm}, {"protocol", c.pulses.protocol.name()}, {"beta", nullptr}};
  j["integrator"] = json{{"dt", c.integrator.dt}, {"rwa", c.integrator.rotating_wave}};
  j["noise"] = json{{"enabled", c.noise.enabled}, {"shots", c.noise.shots}};
  j["seed"] = c.seed;
  json protocols = json::array();
  for (const auto& p : c.ape.protocols) protocols.push_back(p.name());
  j["ape"] = json{{"transition", to_string(c.ape.transition)},
                  {"n_list", c.ape.n_list},
                  {"phi_points", c.ape.phi_points},
                  {"protocols", protocols},
                  {"visibility_floor", c.ape.visibility_floor},
                  {"visibility_decay", c.ape.visibility_decay ? json(*c.ape.visibility_decay) : json(nullptr)}};
  j["leakage"] = json{
      {"fwhm_list", c.leakage.fwhm_list}, {"delays", c.leakage.delays}, {"trajectories", c.leakage.trajectories}};
  const CalibrateBlock& k = c.calibrate;
  j["calibrate"] = json{{"injected_detuning", k.injected_detuning},
                        {"track_t_max", k.track_t_max},
                        {"track_t_step", k.track_t_step},
                        {"axis_advance", k.axis_advance},
                        {"f21_offsets", k.f21_offsets},
                        {"f21_t_max", k.f21_t_max},
                        {"f21_t_step", k.f21_t_step},
                        {"f21_prep_fwhm", k.f21_prep_fwhm},
                        {"z_t_fixed", k.z_t_fixed},
                        {"z_fwhm", k.z_fwhm},
                        {"z_amp_grid", k.z_amp_grid},
                        {"beta_bracket", k.beta_bracket}};
  j["tomography"] = json{{"theta_points", c.tomography.theta_points},
                         {"s_points", c.tomography.s_points},
                         {"mode", c.tomography.mode == PreRotationMode::Ideal ? "ideal" : "simulated"},
                         {"tune_hadamard", c.tomography.tune_hadamard}};
  j["sweep"] = json{{"path", c.sweep.path},
                    {"values", c.sweep.values},
                    {"outputs", c.sweep.outputs},
                    {"theta_deg", c.sweep.theta_deg}};
  j["output"] = json{{"dir", c.output_dir}};
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  json j = to_json(c);
  // Where the files go does not change what is in them.
  j.erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

CalibrationRecord load_calibration(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open calibration " + path.string());
  try {
    return calibration_record_from_json(json::parse(is));
  } catch (const json::exception& e) {
    throw ConfigError("calibration " + path.string() + ": " + e.what());
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"ape", "leakage", "calibrate", "tomography", "sweep"};
  return names;
}

const std::vector<std::string>& sweep_outputs() {
  static const std::vector<std::string> names{"epsilon_deg", "epsilon_rad", "gate_leakage", "leakage", "amplitude",
                                              "ape_epsilon_deg"};
  return names;
}

std::string command_help(std::string_view name) {
  static const std::string common =
      "Common blocks:\n"
      "  device      {dim: 3, f10: 6.0 GHz, anharmonicity: -0.2 GHz, frame: null (= f10)}\n"
      "  pulses      {fwhm: 6 ns, protocol: gaussian | hd | drag | beta:<v>, beta: null}\n"
      "  integrator  {dt: 0.005 ns, rwa: true}\n"
      "  noise       {enabled: false, shots: 1000} (binomial P sampling in ape and tomography);\n"
      "              seed (top level, u64)\n"
      "  output      {dir: \"phaseq-out\"}\n";
  if (name == "ape") {
    return "Amplified phase error: Ramsey fringes after n pseudo-identities, phase shift\n"
           "versus n and the phase error per pi/2 gate for each protocol.\n"
           "  ape  {transition: \"01\" | \"12\", n_list: [0,1,3,5], phi_points: 64,\n"
           "        protocols: [\"gaussian\",\"hd\"], visibility_floor: 0.05, visibility_decay: null}\n"
           "Writes fringes.csv (protocol,n,phi_deg,p_upper) and summary.json.\n" +
           common;
  }
  if (name == "leakage") {
    return "Leakage into |2> after calibrated pi pulses versus width, and the Ramsey error\n"
           "filter (two pi pulses, variable delay) for Gaussian and HD shapes. Needs dim >= 3.\n"
           "  leakage  {fwhm_list: [3..12] ns, delays: [] (41 points on 0..10 ns),\n"
           "           trajectories: false (trajectory_<protocol>.csv: t_ns, P0.., re/im amplitudes)}\n"
           "Writes leakage.csv (tau_ns,P2_gaussian,P2_hd), ref.csv and summary.json.\n" +
           common;
  }
  if (name == "calibrate") {
    return "Calibration ladder: pi and pi/2 amplitudes, qubit frequency from a Ramsey fringe\n"
           "with an advancing final axis, f21 from 1<->2 Ramsey fringes, the Z pulse pi\n"
           "amplitude, and the derivative coefficient that nulls the pi/2 phase error.\n"
           "  calibrate  {injected_detuning: 0 GHz, track_t_max: 400, track_t_step: 1,\n"
           "              axis_advance: 0.05 GHz, f21_offsets: [-0.195,-0.19], f21_t_max: 500,\n"
           "              f21_t_step: 2, f21_prep_fwhm: 4, z_t_fixed: 24, z_fwhm: 6,\n"
           "              z_amp_grid: [] (81 points on 0..0.4 GHz), beta_bracket: [0,1.5]}\n"
           "Writes calibration.json (use with --calibration) and summary.json.\n" +
           common;
  }
  if (name == "tomography") {
    return "Bloch-sphere trajectories from state tomography: fixed-width X rotations of\n"
           "growing amplitude (Gaussian and HD) and the two-stage off-equator Hadamard built\n"
           "from simultaneous HD X and Z pulses.\n"
           "  tomography  {theta_points: 21, s_points: 41, mode: ideal | simulated,\n"
           "               tune_hadamard: true}\n"
           "Writes trajectory_x_gaussian.csv, trajectory_x_hd.csv, trajectory_hadamard.csv\n"
           "(s,x,y,z,leakage) and summary.json.\n" +
           common;
  }
  if (name == "sweep") {
    return "Grid sweep of one numeric config entry against scalar outputs.\n"
           "  sweep  {path: \"pulses.beta\", values: [...], outputs: [\"epsilon_deg\"], theta_deg: 90}\n"
           "Outputs: epsilon_deg, epsilon_rad, gate_leakage, leakage, amplitude, ape_epsilon_deg.\n"
           "Writes sweep.csv and summary.json.\n" +
           common;
  }
  throw InvalidArgument("unknown subcommand '" + std::string(name) + "'");
}

json run_command(std::string_view name, const ExperimentConfig& config, const RunOptions& options) {
  if (options.workers < 1) throw ConfigError("workers must be at least 1");
  json summary;
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError("unknown subcommand '" + std::string(name) + "'");
  }
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create " + options.out_dir.string() + ": " + ec.message());

  if (name == "ape") summary = cmd_ape(config, options);
  if (name == "leakage") summary = cmd_leakage(config, options);
  if (name == "calibrate") summary = cmd_calibrate(config, options);
  if (name == "tomography") summary = cmd_tomography(config, options);
  if (name == "sweep") summary = cmd_sweep(config, options);
  summary["command"] = std::string(name);
  write_json(options.out_dir / "summary.json", summary);
  return summary;
}

}  // namespace phaseq
