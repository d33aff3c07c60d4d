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

#include "phaseq/noise.hpp"

#include <algorithm>
#include <random>

namespace phaseq {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

double sample_probability(double p, const ShotNoise& noise, std::uint64_t stream) {
  std::mt19937_64 rng(splitmix(noise.seed ^ splitmix(stream)));
  std::binomial_distribution<int> draw(noise.shots, std::clamp(p, 0.0, 1.0));
  return static_cast<double>(draw(rng)) / noise.shots;
}

}  // namespace phaseq
