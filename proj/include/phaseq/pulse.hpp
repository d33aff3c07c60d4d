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

// Analytic pulse envelopes and scheduling of gate lists onto the X, Y and Z
// control channels.
//
// Units: x and y channels carry Rabi angular rates in rad/ns, the z channel
// carries a frequency shift of f10 in GHz. Times are in ns.

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace phaseq {

/// A exp(-4 ln2 (t - t0)^2 / tau^2); tau is the full width at half maximum.
struct GaussianEnvelope {
  double amplitude = 0.0;
  double center = 0.0;
  double fwhm = 1.0;
};

double gaussian_value(const GaussianEnvelope& env, double t);
double gaussian_derivative(const GaussianEnvelope& env, double t);

/// -beta * dX/dt / anharmonicity, with `anharmonicity` in rad/ns.
/// Throws InvalidArgument when anharmonicity is zero.
double quadrature_value(const GaussianEnvelope& env, double beta, double anharmonicity, double t);

/// Amplitude whose full Gaussian integral equals theta (two-level area
/// theorem).
double amplitude_for_angle(double theta, double fwhm);

/// Fraction of the full Gaussian area inside center +/- half_width.
double truncated_area_fraction(double half_width, double fwhm);

/// Half width of every scheduled window, in units of the FWHM.
inline constexpr double kWindowHalfWidthInFwhm = 2.0;

class ShapingProtocol {
 public:
  enum class Kind { GaussianOnly, HalfDerivative, DerivativeScaled };

  static ShapingProtocol gaussian_only() { return ShapingProtocol(Kind::GaussianOnly, 0.0); }
  static ShapingProtocol half_derivative() { return ShapingProtocol(Kind::HalfDerivative, 0.5); }
  static ShapingProtocol derivative_scaled(double beta) {
    return ShapingProtocol(Kind::DerivativeScaled, beta);
  }

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  std::string name() const;

  /// Accepts "gaussian", "hd", "drag" or "beta:<value>".
  static ShapingProtocol parse(const std::string& text);

  friend bool operator==(const ShapingProtocol&, const ShapingProtocol&) = default;

 private:
  ShapingProtocol(Kind kind, double beta) : kind_(kind), beta_(beta) {}
  Kind kind_;
  double beta_;
};

enum class Transition { k01, k12 };

/// Lower level of the transition (0 for 0<->1, 1 for 1<->2).
int lower_level(Transition t);
/// Ladder matrix element sqrt(n+1) of the transition.
double ladder_coupling(Transition t);
std::string to_string(Transition t);
Transition parse_transition(const std::string& text);

/// Where an element lands in the schedule. Without a center, elements are
/// placed after everything scheduled so far; simultaneous elements without
/// a center share the previous element's center.
struct Placement {
  std::optional<double> center;
  bool simultaneous = false;
};

struct GateSpec {
  Transition transition = Transition::k01;
  double axis_phi = 0.0;
  double angle = 0.0;
  double fwhm = 6.0;
  ShapingProtocol protocol = ShapingProtocol::gaussian_only();
  /// Drive frequency minus frame frequency, GHz.
  double drive_detuning = 0.0;
  /// Peak X amplitude in rad/ns. When absent it follows from `angle` through
  /// the area theorem and the ladder coupling of `transition`.
  std::optional<double> amplitude;
  Placement placement;

  double peak_amplitude() const;
};

struct ZPulseSpec {
  /// Peak frequency shift of f10, GHz.
  double amplitude = 0.0;
  double fwhm = 6.0;
  Placement placement;
};

struct Idle {
  double duration = 0.0;
};

using SequenceItem = std::variant<GateSpec, ZPulseSpec, Idle>;

struct ScheduleOptions {
  /// Spacing between consecutive sequential windows, ns.
  double gap = 0.0;
  /// Delta/2pi in GHz used to scale derivative quadratures.
  double anharmonicity = -0.2;
  /// Time of the first window start, ns.
  double start = 0.0;
};

struct ChannelValues {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// One scheduled pulse with its window.
struct ScheduledElement {
  enum class Kind { Microwave, Z };
  Kind kind = Kind::Microwave;
  double start = 0.0;
  double end = 0.0;
  GaussianEnvelope envelope;
  // Microwave only.
  Transition transition = Transition::k01;
  double beta = 0.0;
  double anharmonicity = 0.0;  // rad/ns
  double axis_phi = 0.0;
  double drive_detuning = 0.0;
  double angle = 0.0;
  bool simultaneous = false;

  bool contains(double t) const { return t >= start && t < end; }
  ChannelValues value(double t) const;
};

/// A contiguous time span and the elements active in it. Idle spans carry no
/// elements.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  std::vector<std::size_t> elements;
  bool idle() const { return elements.empty(); }
};

class ControlSequence {
 public:
  ControlSequence() = default;
  ControlSequence(std::vector<ScheduledElement> elements, double duration);

  double duration() const { return duration_; }
  std::span<const ScheduledElement> elements() const { return elements_; }

  ChannelValues channels(double t) const;
  double x(double t) const { return channels(t).x; }
  double y(double t) const { return channels(t).y; }
  double z(double t) const { return channels(t).z; }

  /// Partition of [0, duration] into idle spans and spans of overlapping
  /// windows, in time order.
  std::vector<Segment> segments() const;

 private:
  std::vector<ScheduledElement> elements_;
  double duration_ = 0.0;
};

/// Places items left to right. Each Gaussian occupies a window of
/// +/- kWindowHalfWidthInFwhm * fwhm around its center. axis_phi rotates the
/// (X, Y) pair, and drive_detuning adds -2 pi drive_detuning t to the axis.
/// Throws InvalidArgument for invalid specs or overlapping windows that are
/// not flagged simultaneous.
ControlSequence schedule(std::span<const SequenceItem> items, const ScheduleOptions& options = {});

nlohmann::json to_json(const ControlSequence& seq);
ControlSequence control_sequence_from_json(const nlohmann::json& j);

}  // namespace phaseq
