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

#include <span>
#include <vector>

#include "tracer/symbols.hpp"
#include "tracer/torus.hpp"

namespace tracer {

struct GeneratorOptions {
  /// Small-jump cutoff for stable-like measures; jumps below it are replaced
  /// by their second-order Taylor contribution.
  double stable_epsilon = 1e-3;
  /// Stable big-jump integrals run to 1 + far_periods * tau before the
  /// mean-value tail correction.
  int stable_far_periods = 400;
  QuadratureOptions quadrature{};
};

/// A w(x) by direct evaluation of the integro-differential form: drift and
/// second-order terms from the differentiated series, jump integral exact for
/// atoms, adaptive quadrature for densities, Taylor-split quadrature for
/// state-dependent stable-like measures (constant stable parts use the
/// spectral multiplier).
double apply_pointwise(const DrivingModel& model, const PeriodicFunction& w,
                       const Vec& x, const GeneratorOptions& opts = {});

/// A w for a periodic Levy model: coefficients -q(xi_k) what(k).
PeriodicFunction apply_fourier(const DrivingModel& model,
                               const PeriodicFunction& w);

/// Velocity field v(x) = (A w^1(x), ..., A w^d(x)).
class VelocityField {
 public:
  VelocityField(const DrivingModel& model, std::vector<PeriodicFunction> w,
                GeneratorOptions opts = {});

  std::size_t components() const { return w_.size(); }
  bool spectral() const { return !spectral_.empty(); }
  /// Spectral representation of component i (only when spectral()).
  const PeriodicFunction& component(std::size_t i) const { return spectral_.at(i); }

  void evaluate(std::span<const double> x, std::span<double> out) const;
  Vec operator()(const Vec& x) const;
  /// sum_i sup |A w^i|-bound: l1 norm of spectral coefficients, or a probe
  /// maximum for pointwise fields.
  double sup_bound() const { return sup_bound_; }

 private:
  const DrivingModel* model_;
  std::vector<PeriodicFunction> w_;
  std::vector<PeriodicFunction> spectral_;
  GeneratorOptions opts_;
  double sup_bound_ = 0.0;
};

VelocityField velocity(const DrivingModel& model,
                       std::vector<PeriodicFunction> w,
                       GeneratorOptions opts = {});

/// Carre du champ integrand <grad w_i, c grad w_j>(x) +
/// int (w_i(x+y) - w_i(x)) (w_j(x+y) - w_j(x)) nu(x, dy).
double carre_du_champ(const DrivingModel& model, const PeriodicFunction& wi,
                      const PeriodicFunction& wj, const Vec& x,
                      const GeneratorOptions& opts = {});

/// Spectral carre du champ for periodic Levy models via
/// Gamma(f, g) = A(fg) - f A g - g A f.
PeriodicFunction carre_du_champ_spectral(const DrivingModel& model,
                                         const PeriodicFunction& wi,
                                         const PeriodicFunction& wj);

}  // namespace tracer
