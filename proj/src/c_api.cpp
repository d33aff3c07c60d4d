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

#include "phaseq/phaseq.h"

#include <cstring>
#include <memory>
#include <string>

#include "phaseq/calibration.hpp"
#include "phaseq/error.hpp"
#include "phaseq/fringe.hpp"
#include "phaseq/runner.hpp"
#include "phaseq/simulator.hpp"
#include "phaseq/version.hpp"

struct phq_device {
  phaseq::QuditParams params;
  phaseq::PropagatorConfig config;
  std::unique_ptr<phaseq::Simulator> sim;

  void rebuild() { sim = std::make_unique<phaseq::Simulator>(params, config); }
};

struct phq_experiment {
  phaseq::ExperimentConfig config;
  phaseq::RunOptions options;
  std::string out_override;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

phq_status fail(phq_status status, const std::string& what) {
  g_last_error = what;
  return status;
}

template <class F>
phq_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return PHQ_OK;
  } catch (const phaseq::Error& e) {
    switch (e.kind()) {
      case phaseq::ErrorKind::InvalidArgument:
        return fail(PHQ_INVALID_ARGUMENT, e.what());
      case phaseq::ErrorKind::Config:
        return fail(PHQ_CONFIG_ERROR, e.what());
      case phaseq::ErrorKind::Fit:
        return fail(PHQ_FIT_ERROR, e.what());
      case phaseq::ErrorKind::Io:
        return fail(PHQ_IO_ERROR, e.what());
    }
    return fail(PHQ_INTERNAL_ERROR, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PHQ_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(PHQ_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(PHQ_INTERNAL_ERROR, "unknown error");
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) throw phaseq::InvalidArgument(std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* phq_version(void) { return phaseq::kToolVersion; }

const char* phq_last_error(void) { return g_last_error.c_str(); }

const char* phq_status_name(phq_status status) {
  switch (status) {
    case PHQ_OK:
      return "ok";
    case PHQ_INVALID_ARGUMENT:
      return "invalid argument";
    case PHQ_CONFIG_ERROR:
      return "config error";
    case PHQ_FIT_ERROR:
      return "fit error";
    case PHQ_IO_ERROR:
      return "io error";
    case PHQ_INTERNAL_ERROR:
      return "internal error";
  }
  return "unknown status";
}

phq_status phq_device_create(int dim, double f10, double anharmonicity, phq_device** out) {
  return guarded([&] {
    need(out, "out");
    *out = nullptr;
    auto d = std::make_unique<phq_device>();
    d->params.dim = dim;
    d->params.f10 = f10;
    d->params.anharmonicity = anharmonicity;
    d->params.validate();
    d->rebuild();
    *out = d.release();
  });
}

void phq_device_free(phq_device* device) { delete device; }

phq_status phq_device_set_integrator(phq_device* device, double dt, int rotating_wave) {
  return guarded([&] {
    need(device, "device");
    if (!(dt > 0.0)) throw phaseq::InvalidArgument("dt must be positive");
    device->config.dt = dt;
    device->config.rotating_wave = rotating_wave != 0;
    device->rebuild();
  });
}

phq_status phq_tune_amplitude(const phq_device* device, const char* protocol, double theta, double fwhm,
                              double* amplitude) {
  return guarded([&] {
    need(device, "device");
    need(protocol, "protocol");
    need(amplitude, "amplitude");
    *amplitude =
        phaseq::tune_amplitude(*device->sim, phaseq::ShapingProtocol::parse(protocol), theta, fwhm).amplitude;
  });
}

phq_status phq_gate_error(const phq_device* device, const char* protocol, double theta, double fwhm,
                          double amplitude, double* epsilon, double* leakage) {
  return guarded([&] {
    need(device, "device");
    need(protocol, "protocol");
    const phaseq::ShapingProtocol shape = phaseq::ShapingProtocol::parse(protocol);
    const phaseq::Simulator& sim = *device->sim;
    const double a = amplitude > 0.0 ? amplitude : phaseq::tune_amplitude(sim, shape, theta, fwhm).amplitude;
    const phaseq::SequenceItem item = sim.gate(phaseq::Transition::k01, theta, a, shape, fwhm);
    const phaseq::EffectiveGate g = phaseq::effective_gate(device->params, sim.schedule(std::span(&item, 1)),
                                                           device->config, phaseq::Transition::k01, &sim.cache());
    if (epsilon) *epsilon = g.fit.epsilon.rad;
    if (leakage) *leakage = g.leakage;
  });
}

phq_status phq_fit_fringe(const double* x, const double* p, size_t n, int time_kind, double out[4]) {
  return guarded([&] {
    need(x, "x");
    need(p, "p");
    need(out, "out");
    phaseq::FringeScan scan{time_kind ? phaseq::FringeScan::Kind::Time : phaseq::FringeScan::Kind::Phase,
                            std::vector<double>(x, x + n), std::vector<double>(p, p + n)};
    const phaseq::FringeFit fit = phaseq::fit_fringe(scan);
    out[0] = fit.amplitude;
    out[1] = fit.phase_offset;
    out[2] = fit.mean;
    out[3] = fit.frequency;
  });
}

phq_status phq_experiment_create(const char* config_json, phq_experiment** out) {
  return guarded([&] {
    need(config_json, "config_json");
    need(out, "out");
    *out = nullptr;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      throw phaseq::ConfigError(std::string("config: ") + e.what());
    }
    auto x = std::make_unique<phq_experiment>();
    x->config = phaseq::parse_config(j);
    *out = x.release();
  });
}

phq_status phq_experiment_load(const char* config_path, phq_experiment** out) {
  return guarded([&] {
    need(config_path, "config_path");
    need(out, "out");
    *out = nullptr;
    auto x = std::make_unique<phq_experiment>();
    x->config = phaseq::load_config(config_path);
    *out = x.release();
  });
}

void phq_experiment_free(phq_experiment* experiment) { delete experiment; }

phq_status phq_experiment_set_workers(phq_experiment* experiment, int workers) {
  return guarded([&] {
    need(experiment, "experiment");
    if (workers < 1) throw phaseq::InvalidArgument("workers must be at least 1");
    experiment->options.workers = workers;
  });
}

phq_status phq_experiment_set_seed(phq_experiment* experiment, uint64_t seed) {
  return guarded([&] {
    need(experiment, "experiment");
    experiment->config.seed = seed;
  });
}

phq_status phq_experiment_set_output(phq_experiment* experiment, const char* dir) {
  return guarded([&] {
    need(experiment, "experiment");
    experiment->out_override = dir ? dir : "";
  });
}

phq_status phq_experiment_load_calibration(phq_experiment* experiment, const char* path) {
  return guarded([&] {
    need(experiment, "experiment");
    need(path, "path");
    experiment->options.calibration = phaseq::load_calibration(path);
  });
}

phq_status phq_experiment_config_hash(const phq_experiment* experiment, char* buffer, size_t len) {
  return guarded([&] {
    need(experiment, "experiment");
    need(buffer, "buffer");
    const std::string h = phaseq::config_hash(experiment->config);
    if (len < h.size() + 1) throw phaseq::InvalidArgument("hash buffer too small");
    std::memcpy(buffer, h.c_str(), h.size() + 1);
  });
}

phq_status phq_experiment_run(phq_experiment* experiment, const char* command) {
  return guarded([&] {
    need(experiment, "experiment");
    need(command, "command");
    phaseq::RunOptions options = experiment->options;
    options.out_dir = experiment->out_override.empty() ? experiment->config.output_dir : experiment->out_override;
    const nlohmann::json summary = phaseq::run_command(command, experiment->config, options);
    experiment->summary = summary.dump(2);
  });
}

const char* phq_experiment_summary(const phq_experiment* experiment) {
  return experiment ? experiment->summary.c_str() : nullptr;
}

const char* phq_command_help(const char* command) {
  static thread_local std::string text;
  if (!command) return nullptr;
  try {
    text = phaseq::command_help(command);
  } catch (const std::exception&) {
    return nullptr;
  }
  return text.c_str();
}

size_t phq_command_count(void) { return phaseq::command_names().size(); }

const char* phq_command_name(size_t index) {
  const auto& names = phaseq::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

}  // extern "C"
