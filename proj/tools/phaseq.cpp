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

// Command-line front end. Talks to the simulator only through the C API.

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "phaseq/phaseq.h"

namespace {

int exit_code(phq_status s) {
  switch (s) {
    case PHQ_OK:
      return 0;
    case PHQ_CONFIG_ERROR:
    case PHQ_INVALID_ARGUMENT:
      return 2;
    case PHQ_FIT_ERROR:
      return 3;
    default:
      return 1;
  }
}

struct Flags {
  std::string config;
  std::string calibration;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run(const std::string& command, const Flags& f) {
  phq_experiment* x = nullptr;
  phq_status s = f.config.empty() ? phq_experiment_create("{}", &x) : phq_experiment_load(f.config.c_str(), &x);
  if (s == PHQ_OK) s = phq_experiment_set_workers(x, f.workers);
  if (s == PHQ_OK && f.seed_set) s = phq_experiment_set_seed(x, f.seed);
  if (s == PHQ_OK && !f.calibration.empty()) s = phq_experiment_load_calibration(x, f.calibration.c_str());
  if (s == PHQ_OK) s = phq_experiment_set_output(x, f.out.c_str());
  if (s == PHQ_OK) s = phq_experiment_run(x, command.c_str());
  if (s == PHQ_OK) {
    std::fputs(phq_experiment_summary(x), stdout);
    std::fputc('\n', stdout);
  } else {
    std::fprintf(stderr, "phaseq %s: %s: %s\n", command.c_str(), phq_status_name(s), phq_last_error());
  }
  phq_experiment_free(x);
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phaseq: multilevel qubit gate simulator and phase-error metrology"};
  app.set_version_flag("--version", std::string(phq_version()));
  app.require_subcommand(1);

  Flags flags;
  std::string chosen;
  for (std::size_t i = 0; i < phq_command_count(); ++i) {
    const std::string name = phq_command_name(i);
    CLI::App* sub = app.add_subcommand(name, "");
    sub->footer(phq_command_help(name.c_str()));
    sub->add_option("--config", flags.config, "Experiment config (JSON); defaults when omitted")->check(CLI::ExistingFile);
    sub->add_option("--calibration", flags.calibration, "Calibration record written by 'calibrate'")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory (overrides output.dir)");
    sub->add_option("--workers", flags.workers, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& v) {
          flags.seed = v;
          flags.seed_set = true;
        },
        "Shot-noise seed (overrides the config seed)");
    sub->callback([&chosen, name] { chosen = name; });
  }
  app.get_subcommand("ape")->description("Amplified phase error fringes and phase error per gate");
  app.get_subcommand("leakage")->description("Leakage versus pulse width and the Ramsey error filter");
  app.get_subcommand("calibrate")->description("Amplitude, frequency, f21, Z and beta calibration ladder");
  app.get_subcommand("tomography")->description("Tomography trajectories of X rotations and the Hadamard");
  app.get_subcommand("sweep")->description("Parameter sweep of one config entry against scalar outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  return run(chosen, flags);
}
