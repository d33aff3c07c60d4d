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

#include "phaseq/simulator.hpp"

#include <algorithm>

namespace phaseq {

Simulator::Simulator(QuditParams params, PropagatorConfig config, int workers)
    : params_(params), config_(config), workers_(std::max(workers, 1)),
      cache_(std::make_shared<PulseCache>()) {
  params_.validate();
}

Simulator Simulator::with_params(QuditParams params) const {
  Simulator s = *this;
  params.validate();
  s.params_ = params;
  return s;
}

GateSpec Simulator::gate(Transition transition, double angle, double amplitude,
                         const ShapingProtocol& protocol, double fwhm, double axis_phi) const {
  GateSpec g;
  g.transition = transition;
  g.angle = angle;
  g.amplitude = amplitude;
  g.protocol = protocol;
  g.fwhm = fwhm;
  g.axis_phi = axis_phi;
  g.drive_detuning = params_.carrier_offset(transition);
  return g;
}

ControlSequence Simulator::schedule(std::span<const SequenceItem> items, double gap) const {
  ScheduleOptions options;
  options.gap = gap;
  options.anharmonicity = params_.anharmonicity;
  return phaseq::schedule(items, options);
}

Unitary Simulator::unitary(const ControlSequence& seq) const {
  return sequence_unitary(params_, seq, config_, cache_.get());
}

StateVector Simulator::evolve(const ControlSequence& seq, int initial_level) const {
  return unitary(seq) * basis_state(params_.dim, initial_level);
}

}  // namespace phaseq
