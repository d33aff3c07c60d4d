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

// Derivative-free scalar search used by the calibration ladder.

#include <functional>

namespace phaseq {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a minimum of a unimodal function on [a, b].
/// Stops once the bracket is narrower than `x_tol`.
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                      double x_tol = 1e-10, int max_iterations = 200);

/// Bisection on the sign of f over [a, b]. Throws FitError when f(a) and
/// f(b) have the same sign.
double bisect_root(const std::function<double(double)>& f, double a, double b, double x_tol = 1e-10,
                   int max_iterations = 200);

}  // namespace phaseq
