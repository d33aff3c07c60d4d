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

#include "phaseq/optimize.hpp"

#include <cmath>
#include <utility>

#include "phaseq/error.hpp"

namespace phaseq {

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                      double x_tol, int max_iterations) {
  if (!(a < b)) throw InvalidArgument("golden_section_minimize: empty bracket");
  // Reciprocal of the golden ratio.
  const double c = 2.0 / (1.0 + std::sqrt(5.0));
  ScalarMinimum out;
  double u = b - c * (b - a);
  double v = a + c * (b - a);
  double fu = f(u);
  double fv = f(v);
  out.evaluations = 2;
  for (int i = 0; i < max_iterations && (b - a) > x_tol; ++i) {
    if (fu > fv) {
      a = u;
      u = v;
      fu = fv;
      v = a + c * (b - a);
      fv = f(v);
    } else {
      b = v;
      v = u;
      fv = fu;
      u = b - c * (b - a);
      fu = f(u);
    }
    ++out.evaluations;
  }
  if (fu <= fv) {
    out.x = u;
    out.value = fu;
  } else {
    out.x = v;
    out.value = fv;
  }
  return out;
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double x_tol,
                   int max_iterations) {
  if (!(a < b)) throw InvalidArgument("bisect_root: empty bracket");
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (std::signbit(fa) == std::signbit(fb)) {
    throw FitError("bisect_root: no sign change in bracket");
  }
  for (int i = 0; i < max_iterations && (b - a) > x_tol; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (std::signbit(fm) == std::signbit(fa)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace phaseq
