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

#include "phaseq/fringe.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "phaseq/error.hpp"
#include "phaseq/optimize.hpp"

namespace phaseq {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr int kMinSamples = 8;
constexpr int kZeroPadding = 8;

double grid_step(const std::vector<double>& x) {
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(h > 0.0)) throw FitError("fit_fringe: abscissa must be strictly increasing");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw FitError("fit_fringe: abscissa must be uniformly spaced");
    }
  }
  return h;
}

struct Linear {
  double mean = 0.0;
  double a = 0.0;  // cos coefficient
  double b = 0.0;  // sin coefficient
  double sse = 0.0;
};

// Least squares p = mean + a cos(w x) + b sin(w x).
Linear linear_fit(const std::vector<double>& x, const std::vector<double>& p, double w) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd basis(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis(i, 0) = 1.0;
    basis(i, 1) = std::cos(w * x[static_cast<std::size_t>(i)]);
    basis(i, 2) = std::sin(w * x[static_cast<std::size_t>(i)]);
    rhs(i) = p[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d coef = basis.colPivHouseholderQr().solve(rhs);
  Linear out{coef(0), coef(1), coef(2), (basis * coef - rhs).squaredNorm()};
  return out;
}

double rms(const std::vector<double>& x, const std::vector<double>& p, const FringeFit& fit,
           FringeScan::Kind kind) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = p[i] - fit.model(x[i], kind);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(x.size()));
}

FringeFit fit_phase(const FringeScan& scan, double h) {
  const std::size_t n = scan.p.size();
  const double span = h * static_cast<double>(n);
  if (span < kTwoPi - 1e-9) throw FitError("fit_fringe: phase grid must span at least 2 pi");
  FringeFit fit;
  const double periods = span / kTwoPi;
  if (std::abs(periods - std::round(periods)) < 1e-9) {
    std::complex<double> c = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c += scan.p[i] * std::polar(1.0, -scan.abscissa[i]);
      total += scan.p[i];
    }
    c *= 2.0 / static_cast<double>(n);
    fit.amplitude = std::abs(c);
    // c = amplitude exp(-i phi0)
    fit.phase_offset = -std::arg(c);
    fit.mean = total / static_cast<double>(n);
  } else {
    const Linear lin = linear_fit(scan.abscissa, scan.p, 1.0);
    fit.amplitude = std::hypot(lin.a, lin.b);
    fit.phase_offset = std::atan2(lin.b, lin.a);
    fit.mean = lin.mean;
  }
  fit.rms_residual = rms(scan.abscissa, scan.p, fit, FringeScan::Kind::Phase);
  return fit;
}

FringeFit fit_time(const FringeScan& scan, double h) {
  const std::size_t n = scan.p.size();
  const double span = h * static_cast<double>(n - 1);
  double mean = 0.0;
  for (double v : scan.p) mean += v;
  mean /= static_cast<double>(n);

  // Zero-padded DFT magnitude of the mean-removed signal.
  const std::size_t padded = kZeroPadding * n;
  const double df = 1.0 / (h * static_cast<double>(padded));
  const std::size_t bins = padded / 2;
  std::vector<double> mag(bins + 1, 0.0);
  for (std::size_t k = 1; k <= bins; ++k) {
    std::complex<double> acc = 0.0;
    const double w = kTwoPi * df * static_cast<double>(k);
    for (std::size_t i = 0; i < n; ++i) {
      acc += (scan.p[i] - mean) * std::polar(1.0, -w * (scan.abscissa[i] - scan.abscissa[0]));
    }
    mag[k] = std::abs(acc);
  }
  // Skip the DC lobe (one unpadded bin) when looking for the peak.
  const std::size_t first = kZeroPadding;
  if (first >= bins) throw FitError("fit_fringe: time grid too short");
  std::size_t peak = first;
  for (std::size_t k = first; k <= bins; ++k) {
    if (mag[k] > mag[peak]) peak = k;
  }
  double f_peak = df * static_cast<double>(peak);
  if (peak > first && peak < bins) {
    const double a = mag[peak - 1];
    const double b = mag[peak];
    const double c = mag[peak + 1];
    const double denom = a - 2 * b + c;
    if (denom != 0.0) f_peak += df * 0.5 * (a - c) / denom;
  }

  const auto sse = [&](double f) { return linear_fit(scan.abscissa, scan.p, kTwoPi * f).sse; };
  const double lo = std::max(df, f_peak - 2 * df);
  const double hi = f_peak + 2 * df;
  const ScalarMinimum best = golden_section_minimize(sse, lo, hi, 1e-12 * std::max(1.0, hi));
  const double f = best.x;
  if (f * span < 2.0) throw FitError("fit_fringe: time fringe covers fewer than 2 periods");

  const Linear lin = linear_fit(scan.abscissa, scan.p, kTwoPi * f);
  FringeFit fit;
  fit.frequency = f;
  fit.mean = lin.mean;
  fit.amplitude = std::hypot(lin.a, lin.b);
  fit.phase_offset = std::atan2(lin.b, lin.a);
  fit.rms_residual = rms(scan.abscissa, scan.p, fit, FringeScan::Kind::Time);
  return fit;
}

}  // namespace

double FringeFit::model(double x, FringeScan::Kind kind) const {
  const double arg = kind == FringeScan::Kind::Phase ? x : kTwoPi * frequency * x;
  return mean + amplitude * std::cos(arg - phase_offset);
}

FringeFit fit_fringe(const FringeScan& scan) {
  if (scan.abscissa.size() != scan.p.size()) throw FitError("fit_fringe: abscissa/p size mismatch");
  if (scan.p.size() < static_cast<std::size_t>(kMinSamples)) {
    throw FitError("fit_fringe: need at least 8 samples");
  }
  const double h = grid_step(scan.abscissa);
  return scan.kind == FringeScan::Kind::Phase ? fit_phase(scan, h) : fit_time(scan, h);
}

std::vector<double> phase_grid(int n) {
  std::vector<double> g(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = kTwoPi * i / n;
  return g;
}

}  // namespace phaseq
