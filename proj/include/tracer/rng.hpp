// Copyright 2026 The tracer authors
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

#include <array>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace tracer {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key holds the run seed and the upper half of the 128-bit
/// counter holds the stream id, so every (seed, stream) pair owns a disjoint
/// counter space and streams never need to be advanced or split at runtime.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  /// Raw bijection, exposed for known-answer tests.
  static Block encrypt(Block counter, Key key);

  std::uint64_t seed() const;
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

/// Per-path random source: a Philox stream plus the variates the simulators
/// need. Not thread-safe; one instance per worker per path.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  std::uint64_t stream() const { return engine_.stream(); }

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal() { return normal_(engine_); }
  double exponential() { return -std::log(uniform()); }
  std::uint64_t poisson(double mean);

  /// Standard symmetric alpha-stable variate with E exp(i u S) = exp(-|u|^alpha)
  /// (Chambers-Mallows-Stuck).
  double symmetric_stable(double alpha);

  /// Positive (beta)-stable variate with E exp(-u A) = exp(-u^beta),
  /// beta in (0, 1) (Kanter's representation).
  double positive_stable(double beta);

  /// Rotationally invariant alpha-stable vector with
  /// E exp(i<u, S>) = exp(-|u|^alpha), written into `out`.
  void isotropic_stable(double alpha, std::span<double> out);

  Philox4x32& engine() { return engine_; }

 private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace tracer
