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

#include "phaseq/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "phaseq/error.hpp"

namespace phaseq {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

int step_count(double length, double dt) {
  return std::max(1, static_cast<int>(std::ceil(length / dt - 1e-9)));
}

// Fills the diagonal and couplings of H at time t.
void fill_hamiltonian(const QuditParams& params, const ControlSequence& seq, double t,
                      bool rotating_wave, Eigen::MatrixXcd& h) {
  const int d = params.dim;
  const ChannelValues ch = seq.channels(t);
  h.setZero(d, d);
  for (int n = 0; n < d; ++n) {
    h(n, n) = kTwoPi * (params.frame_energy(n) + n * ch.z);
  }
  const cplx co = 0.5 * cplx(ch.x, ch.y);
  cplx counter = 0.0;
  if (!rotating_wave) {
    counter = 0.5 * cplx(ch.x, -ch.y) * std::polar(1.0, 2 * kTwoPi * params.frame_frequency() * t);
  }
  for (int n = 0; n + 1 < d; ++n) {
    const cplx c = std::sqrt(static_cast<double>(n + 1)) * (co + counter);
    h(n + 1, n) = c;
    h(n, n + 1) = std::conj(c);
  }
}

bool is_diagonal(const Eigen::MatrixXcd& h) {
  for (Eigen::Index i = 0; i + 1 < h.rows(); ++i) {
    if (h(i + 1, i) != 0.0) return false;
  }
  return true;
}

class Stepper {
 public:
  explicit Stepper(int dim) : h_(dim, dim), step_(dim, dim) {}

  // Left-multiplies `u` by the midpoint propagators of [start, end).
  void advance(const QuditParams& params, const ControlSequence& seq, double start, double end,
               double dt, bool rotating_wave, Unitary& u) {
    const int n = step_count(end - start, dt);
    const double h = (end - start) / n;
    for (int k = 0; k < n; ++k) {
      apply(params, seq, start + (k + 0.5) * h, h, rotating_wave, u);
    }
  }

  void apply(const QuditParams& params, const ControlSequence& seq, double t_mid, double h,
             bool rotating_wave, Eigen::MatrixXcd& target) {
    fill_hamiltonian(params, seq, t_mid, rotating_wave, h_);
    if (is_diagonal(h_)) {
      for (Eigen::Index i = 0; i < target.rows(); ++i) {
        target.row(i) *= std::polar(1.0, -h_(i, i).real() * h);
      }
      return;
    }
    step_ = hermitian_step(h_, h);
    target = step_ * target;
  }

 private:
  Eigen::MatrixXcd h_;
  Eigen::MatrixXcd step_;
};

Unitary idle_unitary(const QuditParams& params, double length) {
  Eigen::VectorXcd diag(params.dim);
  for (int n = 0; n < params.dim; ++n) {
    diag(n) = std::polar(1.0, -kTwoPi * params.frame_energy(n) * length);
  }
  return diag.asDiagonal();
}

}  // namespace

double QuditParams::frame_energy(int n) const {
  return n * (f10 - frame_frequency()) + 0.5 * n * (n - 1) * anharmonicity;
}

double QuditParams::carrier_offset(Transition t) const {
  const double f = t == Transition::k01 ? f10 : f21();
  return f - frame_frequency();
}

void QuditParams::validate() const {
  if (dim < 2) throw InvalidArgument("qudit dimension must be at least 2, got " + std::to_string(dim));
  if (!std::isfinite(f10) || !std::isfinite(anharmonicity) || !std::isfinite(frame_frequency())) {
    throw InvalidArgument("qudit frequencies must be finite");
  }
}

Eigen::MatrixXcd hamiltonian(const QuditParams& params, const ControlSequence& seq, double t,
                             bool rotating_wave) {
  params.validate();
  Eigen::MatrixXcd h(params.dim, params.dim);
  fill_hamiltonian(params, seq, t, rotating_wave, h);
  return h;
}

Unitary hermitian_step(const Eigen::MatrixXcd& h, double step) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXcd phases =
      (es.eigenvalues().cast<cplx>() * (-kI * step)).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Trajectory propagate(const QuditParams& params, const ControlSequence& seq,
                     const PropagatorConfig& config, const StateVector& psi0) {
  params.validate();
  if (!(config.dt > 0.0)) throw InvalidArgument("propagate: dt must be positive");
  if (psi0.size() != params.dim) throw InvalidArgument("propagate: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw InvalidArgument("propagate: initial state is not normalized");

  Trajectory traj;
  Unitary u = Unitary::Identity(params.dim, params.dim);
  Stepper stepper(params.dim);
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);

  long step_index = 0;
  for (const Segment& seg : seq.segments()) {
    const int n = step_count(seg.end - seg.start, config.dt);
    const double h = (seg.end - seg.start) / n;
    for (int k = 0; k < n; ++k) {
      stepper.apply(params, seq, seg.start + (k + 0.5) * h, h, config.rotating_wave, u);
      ++step_index;
      const StateVector psi = u * psi0;
      traj.max_norm_defect = std::max(traj.max_norm_defect, std::abs(psi.norm() - 1.0));
      if (config.sample_every > 0 && step_index % config.sample_every == 0) {
        traj.times.push_back(seg.start + (k + 1) * h);
        traj.states.push_back(psi);
      }
    }
  }
  traj.unitary = u;
  traj.final_state = u * psi0;
  if (traj.times.back() < seq.duration() - 1e-9) {
    traj.times.push_back(seq.duration());
    traj.states.push_back(traj.final_state);
  }
  return traj;
}

Unitary PulseCache::get_or_compute(const Key& key, const std::function<Unitary()>& compute) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  Unitary u = compute();
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.emplace(key, std::move(u)).first->second;
}

std::size_t PulseCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

Eigen::VectorXcd axis_phases(int dim, double alpha) {
  Eigen::VectorXcd v(dim);
  for (int n = 0; n < dim; ++n) v(n) = std::polar(1.0, n * alpha);
  return v;
}

Eigen::VectorXcd frame_shift(int dim, double offset, double t) {
  return axis_phases(dim, kTwoPi * offset * t);
}

Unitary sequence_unitary(const QuditParams& params, const ControlSequence& seq,
                         const PropagatorConfig& config, PulseCache* cache) {
  params.validate();
  if (!(config.dt > 0.0)) throw InvalidArgument("sequence_unitary: dt must be positive");
  const int d = params.dim;
  Unitary u = Unitary::Identity(d, d);
  Stepper stepper(d);
  const auto elements = seq.elements();

  for (const Segment& seg : seq.segments()) {
    const double length = seg.end - seg.start;
    if (seg.idle()) {
      u = idle_unitary(params, length) * u;
      continue;
    }
    const ScheduledElement& first = elements[seg.elements.front()];
    const bool isolated_pulse = cache != nullptr && config.rotating_wave && seg.elements.size() == 1 &&
                                first.kind == ScheduledElement::Kind::Microwave;
    if (!isolated_pulse) {
      stepper.advance(params, seq, seg.start, seg.end, config.dt, config.rotating_wave, u);
      continue;
    }
    const int steps = step_count(length, config.dt);
    PulseCache::Key key{static_cast<double>(d),
                        params.f10 - params.frame_frequency(),
                        params.anharmonicity,
                        first.envelope.amplitude,
                        first.envelope.center - first.start,
                        first.envelope.fwhm,
                        first.beta,
                        first.anharmonicity,
                        first.drive_detuning,
                        length,
                        static_cast<double>(steps)};
    const Unitary ref = cache->get_or_compute(key, [&] {
      ScheduledElement local = first;
      local.start = 0.0;
      local.end = length;
      local.envelope.center = first.envelope.center - first.start;
      local.axis_phi = 0.0;
      const ControlSequence single({local}, length);
      Unitary r = Unitary::Identity(d, d);
      Stepper s(d);
      s.advance(params, single, 0.0, length, config.dt, true, r);
      return r;
    });
    const double alpha = first.axis_phi - kTwoPi * first.drive_detuning * first.start;
    const Eigen::VectorXcd v = axis_phases(d, alpha);
    u = (v.asDiagonal() * ref * v.conjugate().asDiagonal()) * u;
  }
  return u;
}

QubitGate polar_unitary(const QubitGate& block) {
  Eigen::JacobiSVD<QubitGate> svd(block, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

PhaseError EffectiveGate::epsilon() const {
  if (!conforms()) {
    throw FitError("effective gate is not a phase-corrupted pi/2 rotation (residual " +
                   std::to_string(fit.residual) + ")");
  }
  return fit.epsilon;
}

EffectiveGate effective_gate(const QuditParams& params, const ControlSequence& seq,
                             const PropagatorConfig& config, Transition transition,
                             PulseCache* cache) {
  EffectiveGate g;
  const int lo = lower_level(transition);
  if (lo + 1 >= params.dim) throw InvalidArgument("effective_gate: transition outside the qudit");
  Unitary u = sequence_unitary(params, seq, config, cache);
  const double offset = params.carrier_offset(transition);
  if (offset != 0.0) {
    u = frame_shift(params.dim, offset, seq.duration()).asDiagonal() * u;
  }
  g.full_unitary = u;
  g.block = u.block<2, 2>(lo, lo);
  g.leakage = std::clamp(1.0 - 0.5 * (g.block.col(0).squaredNorm() + g.block.col(1).squaredNorm()), 0.0, 1.0);
  g.qubit_unitary = polar_unitary(g.block);
  g.fit = fit_epsilon(g.qubit_unitary);
  return g;
}

std::vector<double> populations(const StateVector& psi) {
  std::vector<double> p(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) p[static_cast<std::size_t>(i)] = std::norm(psi(i));
  return p;
}

StateVector basis_state(int dim, int level) {
  if (level < 0 || level >= dim) throw InvalidArgument("basis_state: level out of range");
  StateVector v = StateVector::Zero(dim);
  v(level) = 1.0;
  return v;
}

}  // namespace phaseq
