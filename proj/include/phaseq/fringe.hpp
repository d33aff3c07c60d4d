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

// Sinusoid fits of Ramsey-type fringes.
//
// Phase fringes:  p(phi) = mean + amplitude cos(phi - phase_offset)
// Time fringes:   p(t)   = mean + amplitude cos(2 pi frequency t - phase_offset)

#include <vector>

namespace phaseq {

struct FringeScan {
  enum class Kind { Phase, Time };
  Kind kind = Kind::Phase;
  /// phi in rad or t in ns, strictly increasing and uniformly spaced.
  std::vector<double> abscissa;
  std::vector<double> p;
};

struct FringeFit {
  double amplitude = 0.0;
  double phase_offset = 0.0;
  double mean = 0.0;
  /// GHz; time fringes only.
  double frequency = 0.0;
  double rms_residual = 0.0;

  double model(double abscissa, FringeScan::Kind kind) const;
};

/// Phase fringes: first Fourier coefficient over a uniform grid spanning at
/// least 2 pi (least squares when the grid is not a whole number of periods).
/// Time fringes: dominant peak of a zero-padded DFT, quadratic interpolation,
/// then a least-squares refinement of the frequency.
/// Throws FitError for fewer than 8 samples, non-uniform grids, phase grids
/// spanning less than 2 pi, or time fringes with fewer than 2 periods.
FringeFit fit_fringe(const FringeScan& scan);

/// Uniform grid of `n` phases on [0, 2 pi).
std::vector<double> phase_grid(int n);

}  // namespace phaseq
