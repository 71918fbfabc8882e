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

#include "tracer/rng.hpp"

#include <cmath>
#include <numbers>

#include "tracer/error.hpp"

namespace tracer {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed),
           static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

std::uint64_t Philox4x32::seed() const {
  return (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

void Philox4x32::refill() {
  const Block ctr{static_cast<std::uint32_t>(block_),
                  static_cast<std::uint32_t>(block_ >> 32),
                  static_cast<std::uint32_t>(stream_),
                  static_cast<std::uint32_t>(stream_ >> 32)};
  buffer_ = encrypt(ctr, key_);
  ++block_;
  used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ >= 4) refill();
  const std::uint64_t v =
      (static_cast<std::uint64_t>(buffer_[used_ + 1]) << 32) | buffer_[used_];
  used_ += 2;
  return v;
}

double Rng::uniform() {
  // 53 random bits, shifted off zero.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw NumericalError("poisson mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  if (mean < 30.0) {
    // Inversion by sequential search.
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  std::poisson_distribution<std::uint64_t> dist(mean);
  return dist(engine_);
}

double Rng::symmetric_stable(double alpha) {
  using std::numbers::pi;
  const double v = pi * (uniform() - 0.5);
  const double w = exponential();
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

double Rng::positive_stable(double beta) {
  using std::numbers::pi;
  const double u = pi * uniform();
  const double e = exponential();
  const double a = std::sin((1.0 - beta) * u) *
                   std::pow(std::sin(beta * u), beta / (1.0 - beta)) /
                   std::pow(std::sin(u), 1.0 / (1.0 - beta));
  return std::pow(a / e, (1.0 - beta) / beta);
}

void Rng::isotropic_stable(double alpha, std::span<double> out) {
  if (out.size() == 1) {
    out[0] = symmetric_stable(alpha);
    return;
  }
  // Sub-Gaussian representation: sqrt(A) * N(0, 2 I) with A positive
  // (alpha/2)-stable.
  const double scale = std::sqrt(2.0 * positive_stable(0.5 * alpha));
  for (double& v : out) v = scale * normal();
}

}  // namespace tracer
