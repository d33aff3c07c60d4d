/* Copyright 2026 The phaseq Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PHASEQ_PHASEQ_H_
#define PHASEQ_PHASEQ_H_

/* C interface to the phaseq simulator and experiment runner.
 *
 * Handles are opaque and owned by the caller; free them with the matching
 * *_free function. Every call returns a phq_status; on failure the message is
 * available from phq_last_error() on the same thread until the next call. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PHQ_API __declspec(dllexport)
#else
#define PHQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phq_status {
  PHQ_OK = 0,
  PHQ_INVALID_ARGUMENT = 1,
  PHQ_CONFIG_ERROR = 2,
  PHQ_FIT_ERROR = 3,
  PHQ_IO_ERROR = 4,
  PHQ_INTERNAL_ERROR = 5
} phq_status;

typedef struct phq_device phq_device;
typedef struct phq_experiment phq_experiment;

PHQ_API const char* phq_version(void);
PHQ_API const char* phq_last_error(void);
PHQ_API const char* phq_status_name(phq_status status);

/* ---- device-level calls ---- */

/* anharmonicity and f10 in GHz. */
PHQ_API phq_status phq_device_create(int dim, double f10, double anharmonicity, phq_device** out);
PHQ_API void phq_device_free(phq_device* device);
PHQ_API phq_status phq_device_set_integrator(phq_device* device, double dt, int rotating_wave);

/* Amplitude (rad/ns) of a 0<->1 rotation by theta with the given protocol
 * ("gaussian", "hd", "drag", "beta:<v>") tuned on the simulated device. */
PHQ_API phq_status phq_tune_amplitude(const phq_device* device, const char* protocol, double theta, double fwhm,
                                      double* amplitude);

/* Phase error (rad) and leakage of a 0<->1 rotation by theta. A non-positive
 * amplitude selects the tuned amplitude. */
PHQ_API phq_status phq_gate_error(const phq_device* device, const char* protocol, double theta, double fwhm,
                                  double amplitude, double* epsilon, double* leakage);

/* Fits p = mean + A cos(x - phi0) (phase fringe, time_kind = 0) or
 * mean + A cos(2 pi f x - phi0) (time fringe, time_kind != 0).
 * out receives {A, phi0, mean, f}. */
PHQ_API phq_status phq_fit_fringe(const double* x, const double* p, size_t n, int time_kind, double out[4]);

/* ---- experiments ---- */

PHQ_API phq_status phq_experiment_create(const char* config_json, phq_experiment** out);
PHQ_API phq_status phq_experiment_load(const char* config_path, phq_experiment** out);
PHQ_API void phq_experiment_free(phq_experiment* experiment);
PHQ_API phq_status phq_experiment_set_workers(phq_experiment* experiment, int workers);
PHQ_API phq_status phq_experiment_set_seed(phq_experiment* experiment, uint64_t seed);
/* NULL or "" keeps the config's output.dir. */
PHQ_API phq_status phq_experiment_set_output(phq_experiment* experiment, const char* dir);
PHQ_API phq_status phq_experiment_load_calibration(phq_experiment* experiment, const char* path);
/* Writes a NUL-terminated 16-digit hex hash; len must be at least 17. */
PHQ_API phq_status phq_experiment_config_hash(const phq_experiment* experiment, char* buffer, size_t len);
/* Runs "ape", "leakage", "calibrate", "tomography" or "sweep". */
PHQ_API phq_status phq_experiment_run(phq_experiment* experiment, const char* command);
/* summary.json of the last successful run; valid until the next run or free. */
PHQ_API const char* phq_experiment_summary(const phq_experiment* experiment);

/* Help text for a subcommand, or NULL if the name is unknown. */
PHQ_API const char* phq_command_help(const char* command);
/* Number of subcommands and their names. */
PHQ_API size_t phq_command_count(void);
PHQ_API const char* phq_command_name(size_t index);

#ifdef __cplusplus
}
#endif

#endif /* PHASEQ_PHASEQ_H_ */
