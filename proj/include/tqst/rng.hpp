// Copyright 2026 The tqstnet developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace tqst {

/// Counter-based pseudo-random generator (SplitMix64).
///
/// Uses only 64-bit integer arithmetic, so a fixed seed produces the same
/// uniform stream on every platform. Streams for parallel work are derived
/// with split(), never by sharing one instance.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double strictly inside (0, 1).
  double uniform() { return ((next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform double strictly inside (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  /// Standard normal deviate (Box-Muller; consumes two uniforms).
  double gauss() {
    double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Complex number with independent standard-normal real and imaginary
  /// parts, from a single Box-Muller pair.
  std::complex<double> gauss_complex() {
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  /// Derive an independent generator for stream `stream`. Deterministic in
  /// (current state, stream) and independent of calls on `this`.
  Rng split(std::uint64_t stream) const {
    return Rng(mix64(state_ ^ mix64(stream + 0x9e3779b97f4a7c15ULL)));
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace tqst
