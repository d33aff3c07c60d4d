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

#include "phaseq/pulse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "phaseq/error.hpp"

namespace phaseq {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
const double kGaussK = 4.0 * std::numbers::ln2;
constexpr double kOverlapSlack = 1e-9;

double window_half_width(double fwhm) { return kWindowHalfWidthInFwhm * fwhm; }

void check_fwhm(double fwhm, const char* what) {
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) {
    throw InvalidArgument(std::string(what) + ": fwhm must be positive");
  }
}

}  // namespace

double gaussian_value(const GaussianEnvelope& env, double t) {
  const double u = (t - env.center) / env.fwhm;
  return env.amplitude * std::exp(-kGaussK * u * u);
}

double gaussian_derivative(const GaussianEnvelope& env, double t) {
  const double dt = t - env.center;
  return gaussian_value(env, t) * (-2.0 * kGaussK * dt / (env.fwhm * env.fwhm));
}

double quadrature_value(const GaussianEnvelope& env, double beta, double anharmonicity, double t) {
  if (anharmonicity == 0.0) {
    throw InvalidArgument("quadrature_value: anharmonicity must be non-zero");
  }
  if (beta == 0.0) return 0.0;
  return -beta * gaussian_derivative(env, t) / anharmonicity;
}

double amplitude_for_angle(double theta, double fwhm) {
  check_fwhm(fwhm, "amplitude_for_angle");
  return theta / (fwhm * std::sqrt(std::numbers::pi / kGaussK));
}

double truncated_area_fraction(double half_width, double fwhm) {
  check_fwhm(fwhm, "truncated_area_fraction");
  return std::erf(half_width * std::sqrt(kGaussK) / fwhm);
}

std::string ShapingProtocol::name() const {
  switch (kind_) {
    case Kind::GaussianOnly:
      return "gaussian";
    case Kind::HalfDerivative:
      return "hd";
    case Kind::DerivativeScaled: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof buf, beta_);
      return "beta:" + std::string(buf, res.ptr);
    }
  }
  return "unknown";
}

ShapingProtocol ShapingProtocol::parse(const std::string& text) {
  if (text == "gaussian" || text == "gaussian_only") return gaussian_only();
  if (text == "hd" || text == "half_derivative") return half_derivative();
  if (text == "drag") return derivative_scaled(1.0);
  if (text.rfind("beta:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double beta = std::stod(text.substr(5), &used);
      if (used == text.size() - 5 && std::isfinite(beta)) return derivative_scaled(beta);
    } catch (const std::exception&) {
    }
  }
  throw InvalidArgument("unknown shaping protocol '" + text + "'");
}

int lower_level(Transition t) { return t == Transition::k01 ? 0 : 1; }

double ladder_coupling(Transition t) { return std::sqrt(static_cast<double>(lower_level(t) + 1)); }

std::string to_string(Transition t) { return t == Transition::k01 ? "01" : "12"; }

Transition parse_transition(const std::string& text) {
  if (text == "01" || text == "10") return Transition::k01;
  if (text == "12" || text == "21") return Transition::k12;
  throw InvalidArgument("unknown transition '" + text + "'");
}

double GateSpec::peak_amplitude() const {
  if (amplitude) return *amplitude;
  return amplitude_for_angle(angle, fwhm) / ladder_coupling(transition);
}

ChannelValues ScheduledElement::value(double t) const {
  ChannelValues v;
  if (!contains(t)) return v;
  if (kind == Kind::Z) {
    v.z = gaussian_value(envelope, t);
    return v;
  }
  const double big_x = gaussian_value(envelope, t);
  const double big_y = beta == 0.0 ? 0.0 : quadrature_value(envelope, beta, anharmonicity, t);
  const double phase = axis_phi - kTwoPi * drive_detuning * t;
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  v.x = c * big_x - s * big_y;
  v.y = s * big_x + c * big_y;
  return v;
}

ControlSequence::ControlSequence(std::vector<ScheduledElement> elements, double duration)
    : elements_(std::move(elements)), duration_(duration) {}

ChannelValues ControlSequence::channels(double t) const {
  ChannelValues total;
  for (const auto& e : elements_) {
    if (!e.contains(t)) continue;
    const ChannelValues v = e.value(t);
    total.x += v.x;
    total.y += v.y;
    total.z += v.z;
  }
  return total;
}

std::vector<Segment> ControlSequence::segments() const {
  std::vector<std::size_t> order(elements_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return elements_[a].start < elements_[b].start;
  });

  std::vector<Segment> out;
  double cursor = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    Segment active;
    active.start = elements_[order[i]].start;
    active.end = elements_[order[i]].end;
    active.elements.push_back(order[i]);
    ++i;
    while (i < order.size() && elements_[order[i]].start < active.end - kOverlapSlack) {
      active.end = std::max(active.end, elements_[order[i]].end);
      active.elements.push_back(order[i]);
      ++i;
    }
    if (active.start > cursor) out.push_back(Segment{cursor, active.start, {}});
    cursor = std::max(cursor, active.end);
    out.push_back(std::move(active));
  }
  if (duration_ > cursor) out.push_back(Segment{cursor, duration_, {}});
  return out;
}

ControlSequence schedule(std::span<const SequenceItem> items, const ScheduleOptions& options) {
  if (!(options.gap >= 0.0)) throw InvalidArgument("schedule: gap must be non-negative");
  if (!(options.start >= 0.0)) throw InvalidArgument("schedule: start must be non-negative");

  std::vector<ScheduledElement> elements;
  double cursor = options.start;
  bool after_window = false;
  std::optional<double> prev_center;

  auto place = [&](const Placement& placement, double fwhm) {
    const double half = window_half_width(fwhm);
    double center = 0.0;
    if (placement.center) {
      center = options.start + *placement.center;
    } else if (placement.simultaneous) {
      if (!prev_center) throw InvalidArgument("schedule: simultaneous element has no predecessor");
      center = *prev_center;
    } else {
      center = cursor + (after_window ? options.gap : 0.0) + half;
    }
    if (center - half < options.start - kOverlapSlack) {
      throw InvalidArgument("schedule: element window starts before the sequence");
    }
    prev_center = center;
    after_window = true;
    cursor = std::max(cursor, center + half);
    return center;
  };

  for (const auto& item : items) {
    if (const auto* gate = std::get_if<GateSpec>(&item)) {
      check_fwhm(gate->fwhm, "schedule");
      if (!(std::abs(gate->angle) <= kTwoPi + 1e-12)) {
        throw InvalidArgument("schedule: gate angle outside [-2pi, 2pi]");
      }
      const double center = place(gate->placement, gate->fwhm);
      ScheduledElement e;
      e.kind = ScheduledElement::Kind::Microwave;
      e.envelope = GaussianEnvelope{gate->peak_amplitude(), center, gate->fwhm};
      e.start = center - window_half_width(gate->fwhm);
      e.end = center + window_half_width(gate->fwhm);
      e.transition = gate->transition;
      e.beta = gate->protocol.beta();
      e.anharmonicity = kTwoPi * options.anharmonicity;
      if (e.beta != 0.0 && e.anharmonicity == 0.0) {
        throw InvalidArgument("schedule: derivative shaping needs a non-zero anharmonicity");
      }
      e.axis_phi = gate->axis_phi;
      e.drive_detuning = gate->drive_detuning;
      e.angle = gate->angle;
      e.simultaneous = gate->placement.simultaneous;
      elements.push_back(e);
    } else if (const auto* zp = std::get_if<ZPulseSpec>(&item)) {
      check_fwhm(zp->fwhm, "schedule");
      const double center = place(zp->placement, zp->fwhm);
      ScheduledElement e;
      e.kind = ScheduledElement::Kind::Z;
      e.envelope = GaussianEnvelope{zp->amplitude, center, zp->fwhm};
      e.start = center - window_half_width(zp->fwhm);
      e.end = center + window_half_width(zp->fwhm);
      e.simultaneous = zp->placement.simultaneous;
      elements.push_back(e);
    } else {
      const auto& idle = std::get<Idle>(item);
      if (!(idle.duration >= 0.0)) throw InvalidArgument("schedule: idle duration must be non-negative");
      cursor += idle.duration;
      after_window = false;
    }
  }

  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i + 1; j < elements.size(); ++j) {
      const auto& a = elements[i];
      const auto& b = elements[j];
      const bool overlap = a.start < b.end - kOverlapSlack && b.start < a.end - kOverlapSlack;
      if (overlap && !a.simultaneous && !b.simultaneous) {
        throw InvalidArgument("schedule: overlapping pulses must be flagged simultaneous");
      }
    }
  }
  return ControlSequence(std::move(elements), items.empty() ? 0.0 : cursor);
}

nlohmann::json to_json(const ControlSequence& seq) {
  nlohmann::json elements = nlohmann::json::array();
  for (const auto& e : seq.elements()) {
    nlohmann::json j;
    j["kind"] = e.kind == ScheduledElement::Kind::Z ? "z" : "microwave";
    j["start"] = e.start;
    j["end"] = e.end;
    j["center"] = e.envelope.center;
    j["fwhm"] = e.envelope.fwhm;
    j["amplitude"] = e.envelope.amplitude;
    j["simultaneous"] = e.simultaneous;
    if (e.kind == ScheduledElement::Kind::Microwave) {
      j["transition"] = to_string(e.transition);
      j["beta"] = e.beta;
      j["anharmonicity"] = e.anharmonicity;
      j["axis_phi"] = e.axis_phi;
      j["drive_detuning"] = e.drive_detuning;
      j["angle"] = e.angle;
    }
    elements.push_back(std::move(j));
  }
  return nlohmann::json{{"duration", seq.duration()}, {"elements", std::move(elements)}};
}

ControlSequence control_sequence_from_json(const nlohmann::json& j) {
  try {
    std::vector<ScheduledElement> elements;
    for (const auto& je : j.at("elements")) {
      ScheduledElement e;
      const std::string kind = je.at("kind").get<std::string>();
      if (kind != "z" && kind != "microwave") throw InvalidArgument("unknown element kind '" + kind + "'");
      e.kind = kind == "z" ? ScheduledElement::Kind::Z : ScheduledElement::Kind::Microwave;
      e.start = je.at("start").get<double>();
      e.end = je.at("end").get<double>();
      e.envelope = GaussianEnvelope{je.at("amplitude").get<double>(), je.at("center").get<double>(),
                                    je.at("fwhm").get<double>()};
      check_fwhm(e.envelope.fwhm, "control_sequence_from_json");
      e.simultaneous = je.value("simultaneous", false);
      if (e.kind == ScheduledElement::Kind::Microwave) {
        e.transition = parse_transition(je.at("transition").get<std::string>());
        e.beta = je.at("beta").get<double>();
        e.anharmonicity = je.at("anharmonicity").get<double>();
        e.axis_phi = je.at("axis_phi").get<double>();
        e.drive_detuning = je.at("drive_detuning").get<double>();
        e.angle = je.value("angle", 0.0);
      }
      elements.push_back(e);
    }
    return ControlSequence(std::move(elements), j.at("duration").get<double>());
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidArgument(std::string("control sequence json: ") + ex.what());
  }
}

}  // namespace phaseq
