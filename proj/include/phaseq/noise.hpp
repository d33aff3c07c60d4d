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

// Binomial measurement noise with reproducible per-point streams.

#include <cstdint>

namespace phaseq {

struct ShotNoise {
  int shots = 1000;
  std::uint64_t seed = 0;
};

/// Fraction of `noise.shots` successes at probability p. The draw depends
/// only on (seed, stream), so parallel scans stay deterministic.
double sample_probability(double p, const ShotNoise& noise, std::uint64_t stream);

}  // namespace phaseq
