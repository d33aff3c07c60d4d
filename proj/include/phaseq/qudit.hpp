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

// Time evolution of a d-level anharmonic ladder driven by a ControlSequence
// in a frame rotating at a fixed frequency.
//
// H/hbar = sum_n 2 pi [n (f10 - f_frame) + n(n-1)/2 Delta + n z(t)] |n><n|
//        + sum_n sqrt(n+1)/2 [(x + i y) |n+1><n| + h.c.]
//
// With x + i y = Omega exp(i phi) a pulse realizes
// exp(-i theta/2 (cos phi sx + sin phi sy)) on a two-level system.

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "phaseq/gate_algebra.hpp"
#include "phaseq/pulse.hpp"

namespace phaseq {

using StateVector = Eigen::VectorXcd;
using Unitary = Eigen::MatrixXcd;

struct QuditParams {
  int dim = 3;
  /// 0<->1 transition frequency, GHz.
  double f10 = 6.0;
  /// Delta/2pi = f21 - f10, GHz.
  double anharmonicity = -0.2;
  /// Frame frequency; defaults to f10.
  std::optional<double> frame;

  double frame_frequency() const { return frame.value_or(f10); }
  double f21() const { return f10 + anharmonicity; }
  /// E_n/h - n f_frame in GHz.
  double frame_energy(int n) const;
  /// Drive frequency of `t` minus the frame frequency, GHz.
  double carrier_offset(Transition t) const;
  /// Throws InvalidArgument unless dim >= 2 and all values are finite.
  void validate() const;
};

struct PropagatorConfig {
  double dt = 0.005;
  bool rotating_wave = true;
  /// Record every k-th step in the trajectory; 0 records only the end points.
  int sample_every = 0;
};

Eigen::MatrixXcd hamiltonian(const QuditParams& params, const ControlSequence& seq, double t,
                             bool rotating_wave = true);

/// exp(-i H h) for Hermitian H.
Unitary hermitian_step(const Eigen::MatrixXcd& h, double step);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  StateVector final_state;
  Unitary unitary;
  /// max |norm - 1| over every step.
  double max_norm_defect = 0.0;
};

/// Exponential-midpoint propagation over each segment of the sequence. Each
/// segment of length L is split into ceil(L/dt) equal steps. Throws
/// InvalidArgument for a non-normalized initial state.
Trajectory propagate(const QuditParams& params, const ControlSequence& seq,
                     const PropagatorConfig& config, const StateVector& psi0);

/// Memoizes the propagator of isolated microwave pulses. A pulse that only
/// differs by start time, axis or carrier phase is a conjugation of a cached
/// reference by diag(exp(i n alpha)). Thread-safe.
class PulseCache {
 public:
  using Key = std::vector<double>;

  Unitary get_or_compute(const Key& key, const std::function<Unitary()>& compute);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<Key, Unitary> entries_;
};

/// Full-sequence propagator. Produces the same result as propagate() up to
/// rounding; idle spans are stepped exactly and isolated pulses go through
/// `cache` when one is given.
Unitary sequence_unitary(const QuditParams& params, const ControlSequence& seq,
                         const PropagatorConfig& config, PulseCache* cache = nullptr);

/// diag(exp(i n alpha)).
Eigen::VectorXcd axis_phases(int dim, double alpha);

/// exp(i 2 pi offset n t): moves a state from the simulation frame to one
/// rotating faster by `offset` GHz.
Eigen::VectorXcd frame_shift(int dim, double offset, double t);

struct EffectiveGate {
  Unitary full_unitary;
  /// Raw 2x2 block on the transition's levels.
  QubitGate block;
  /// Nearest unitary to `block` (polar decomposition).
  QubitGate qubit_unitary;
  double leakage = 0.0;
  EpsilonFit fit;

  bool conforms() const { return fit.residual <= kEpsilonConformanceThreshold; }
  /// Throws FitError when the block is not a phase-corrupted pi/2 rotation.
  PhaseError epsilon() const;
};

/// Nearest unitary in Frobenius norm.
QubitGate polar_unitary(const QubitGate& block);

/// Propagates from identity and reads off the block on `transition`'s levels,
/// after moving into the frame of that transition's carrier
/// (params.carrier_offset(transition)).
EffectiveGate effective_gate(const QuditParams& params, const ControlSequence& seq,
                             const PropagatorConfig& config,
                             Transition transition = Transition::k01, PulseCache* cache = nullptr);

/// Populations |c_n|^2.
std::vector<double> populations(const StateVector& psi);

StateVector basis_state(int dim, int level);

}  // namespace phaseq
