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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tracer/linalg.hpp"

namespace tracer {

struct QuadratureOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-14;
  /// Hard cap on integrand evaluations across one Integrator's lifetime.
  std::size_t max_evaluations = 1'000'000;
};

/// Vector-valued integrand: writes `out.size()` components at `x`.
using Integrand1d = std::function<void(double x, std::span<double> out)>;
using IntegrandNd = std::function<void(const Vec& y, std::span<double> out)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration with a shared
/// evaluation budget. Nested box integration is built on the 1-d rule; the
/// inner axes split at the unit-ball boundary so the |y| <= 1 compensator
/// indicator never falls inside a panel.
class Integrator {
 public:
  explicit Integrator(QuadratureOptions opts = {}) : opts_(opts) {}

  /// Integrates over [a, b] split at `breaks` (points outside are ignored).
  /// Throws NumericalError when the tolerance cannot be met within budget.
  std::vector<double> integrate(const Integrand1d& f, std::size_t components,
                                double a, double b,
                                std::span<const double> breaks = {});

  double integrate_scalar(const std::function<double(double)>& f, double a,
                          double b, std::span<const double> breaks = {});

  /// Integrates over the box [lo, hi], splitting every axis where the
  /// partial point enters or leaves the closed unit ball.
  std::vector<double> integrate_box(const IntegrandNd& f,
                                    std::size_t components, const Vec& lo,
                                    const Vec& hi);

  std::size_t evaluations() const { return evaluations_; }
  const QuadratureOptions& options() const { return opts_; }

 private:
  void nested(const IntegrandNd& f, std::size_t components, const Vec& lo,
              const Vec& hi, Vec& point, Eigen::Index axis,
              double outer_radius2, std::span<double> out);

  QuadratureOptions opts_;
  std::size_t evaluations_ = 0;
};

}  // namespace tracer
