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

#include <functional>
#include <optional>
#include <span>
#include <variant>

#include "tracer/torus.hpp"

namespace tracer {

/// Scalar coefficient x -> f(x) of a driving model: a constant, a
/// band-limited periodic function, or an arbitrary callable.
class ScalarField {
 public:
  using Callable = std::function<double(std::span<const double>)>;

  ScalarField() : repr_(0.0) {}
  ScalarField(double value) : repr_(value) {}  // NOLINT: implicit by design
  explicit ScalarField(PeriodicFunction f);
  explicit ScalarField(Callable f) : repr_(std::move(f)) {}

  double operator()(std::span<const double> x) const;
  double operator()(const Vec& x) const {
    return (*this)(std::span<const double>(x.data(), x.size()));
  }

  bool is_constant() const { return std::holds_alternative<double>(repr_); }
  std::optional<double> constant_value() const;
  const PeriodicFunction* periodic() const {
    return std::get_if<PeriodicFunction>(&repr_);
  }

 private:
  std::variant<double, PeriodicFunction, Callable> repr_;
};

}  // namespace tracer
