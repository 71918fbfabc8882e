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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tracer/linalg.hpp"

namespace tracer {

using Complex = std::complex<double>;
using LatticePoint = std::vector<int>;

/// A point of R^d / (tau_1 Z x ... x tau_d Z), each coordinate in [0, tau_j).
struct TorusPoint {
  Vec coords;
};

/// Covering map: componentwise x_j mod tau_j into [0, tau_j).
TorusPoint project(const Vec& x, const Vec& period);

/// In-place variant used inside simulation loops.
void project_into(std::span<const double> x, const Vec& period,
                  std::span<double> out);

struct FourierTerm {
  LatticePoint k;
  Complex coeff;
};

/// Frequency conventions for the dual lattice of a torus.
///  - kPerAxis:      xi_j = 2 pi k_j / tau_j (standard torus dual).
///  - kScalarVolume: xi   = 2 pi k / |tau|, |tau| = tau_1 ... tau_d.
/// The two agree in one dimension.
enum class FrequencyConvention { kPerAxis, kScalarVolume };

Vec dual_frequency(const LatticePoint& k, const Vec& period,
                   FrequencyConvention conv = FrequencyConvention::kPerAxis);

/// Real-valued tau-periodic function given by finitely many Fourier
/// coefficients, w(x) = sum_k what(k) exp(i <xi_k, x>) with per-axis
/// frequencies. Coefficients must satisfy what(-k) = conj(what(k)).
class PeriodicFunction {
 public:
  PeriodicFunction() = default;
  PeriodicFunction(Vec period, std::vector<FourierTerm> terms,
                   std::string label = {});

  static PeriodicFunction constant(const Vec& period, double value);
  /// amplitude * sin(2 pi mode x_axis / tau_axis)
  static PeriodicFunction sine(const Vec& period, int axis, int mode = 1,
                               double amplitude = 1.0);
  static PeriodicFunction cosine(const Vec& period, int axis, int mode = 1,
                                 double amplitude = 1.0);

  int dimension() const { return static_cast<int>(period_.size()); }
  const Vec& period() const { return period_; }
  const std::vector<FourierTerm>& terms() const { return terms_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  Complex coefficient(const LatticePoint& k) const;
  /// Largest |k|_inf in the support (0 for constants / empty support).
  int support_radius() const;
  /// sum |k|^2 |what(k)|, finite for every band-limited function.
  double smoothness_sum() const;
  /// sum |what(k)|, an upper bound for sup |w|.
  double coefficient_l1() const;
  double mean() const { return coefficient(LatticePoint(dimension(), 0)).real(); }

  /// Real part of the series; throws ModelError when the imaginary residual
  /// exceeds 1e-12 (scaled by the coefficient l1 norm).
  double operator()(const Vec& x) const;
  double evaluate(std::span<const double> x) const;

  Vec frequency(const FourierTerm& term) const {
    return dual_frequency(term.k, period_);
  }

  PeriodicFunction operator+(const PeriodicFunction& other) const;
  PeriodicFunction scaled(double factor) const;
  /// Pointwise product (coefficient convolution).
  PeriodicFunction product(const PeriodicFunction& other) const;

 private:
  void normalize();

  Vec period_;
  std::vector<FourierTerm> terms_;
  std::string label_;
  double l1_ = 0.0;
};

double evaluate(const PeriodicFunction& w, const Vec& x);

/// Term-by-term differentiated series.
Vec gradient(const PeriodicFunction& w, const Vec& x);
Mat hessian(const PeriodicFunction& w, const Vec& x);

/// (1/2) tr(c grad^2 w)(x): the second-order part of the generator.
double hessian_trace_form(const PeriodicFunction& w, const Vec& x,
                          const Mat& c);

/// Approximates what(k) for |k|_inf <= max_radius from samples on the uniform
/// grid x_n = n_j tau_j / N_j (row-major, axis 0 slowest). Requires
/// N_j >= 2 max_radius + 2 on every axis.
PeriodicFunction fourier_coefficients(std::span<const double> samples,
                                      const std::vector<int>& grid,
                                      const Vec& period, int max_radius);

/// Uniform tensor grid over one period: node count per axis, and visit()
/// calls f(point) for every node in row-major order.
class TorusGrid {
 public:
  TorusGrid(Vec period, std::vector<int> points_per_axis);
  std::size_t size() const { return size_; }
  const Vec& period() const { return period_; }
  const std::vector<int>& shape() const { return shape_; }
  Vec point(std::size_t index) const;
  double weight() const { return 1.0 / static_cast<double>(size_); }

 private:
  Vec period_;
  std::vector<int> shape_;
  std::size_t size_;
};

}  // namespace tracer
