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

#pragma once

// Convenience bundle of a device, integrator settings and a shared pulse
// cache, used by every experiment.

#include <memory>
#include <span>

#include "phaseq/pulse.hpp"
#include "phaseq/qudit.hpp"

namespace phaseq {

class Simulator {
 public:
  explicit Simulator(QuditParams params, PropagatorConfig config = {}, int workers = 1);

  const QuditParams& params() const { return params_; }
  const PropagatorConfig& config() const { return config_; }
  int workers() const { return workers_; }

  /// Same integrator settings and cache, different device.
  Simulator with_params(QuditParams params) const;

  /// A gate resonant with `transition` of this device (drive_detuning set to
  /// the carrier offset from the frame).
  GateSpec gate(Transition transition, double angle, double amplitude, const ShapingProtocol& protocol,
                double fwhm, double axis_phi = 0.0) const;

  ControlSequence schedule(std::span<const SequenceItem> items, double gap = 0.0) const;
  Unitary unitary(const ControlSequence& seq) const;
  StateVector evolve(const ControlSequence& seq, int initial_level = 0) const;

  PulseCache& cache() const { return *cache_; }

 private:
  QuditParams params_;
  PropagatorConfig config_;
  int workers_;
  std::shared_ptr<PulseCache> cache_;
};

}  // namespace phaseq
