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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tracer/generator.hpp"
#include "tracer/simulate.hpp"
#include "tracer/symbols.hpp"
#include "tracer/torus.hpp"

namespace tracer {

/// Trapezoid time average (1/T) int_0^T f(F_s) ds over the grid of `path`.
/// A zero-length path returns f(F_0).
double birkhoff_average(const PathSample& path,
                        const std::function<double(std::span<const double>)>& f);
double birkhoff_average(const PathSample& path, const PeriodicFunction& f);

// ---------------------------------------------------------------------------
// Occupation measures on the torus
// ---------------------------------------------------------------------------

class OccupationHistogram {
 public:
  OccupationHistogram(Vec period, std::vector<int> bins);
  /// Uniform bin count on every axis.
  OccupationHistogram(Vec period, int bins_per_axis);

  int dimension() const { return static_cast<int>(period_.size()); }
  const Vec& period() const { return period_; }
  const std::vector<int>& bins() const { return bins_; }
  std::size_t cells() const { return counts_.size(); }
  const std::vector<double>& counts() const { return counts_; }
  double mass() const { return mass_; }

  std::size_t cell_of(std::span<const double> torus_point) const;
  Vec cell_center(std::size_t cell) const;
  void add(std::span<const double> torus_point, double weight = 1.0);
  void merge(const OccupationHistogram& other);

  /// counts / mass (throws when empty).
  std::vector<double> probabilities() const;
  double tv_to_uniform() const;
  double tv(const OccupationHistogram& other) const;

 private:
  Vec period_;
  std::vector<int> bins_;
  std::vector<double> counts_;
  double mass_ = 0.0;
};

/// Time-weighted (trapezoid) histogram of the torus projection of `path`,
/// skipping grid points before `burn_in` (a time).
OccupationHistogram occupation_histogram(const PathSample& path, int bins_per_axis,
                                         double burn_in = 0.0);

struct PilotOptions {
  double horizon = 5000.0;
  double burn_in_fraction = 0.1;
  int bins_per_axis = 64;
  double dt = 1e-2;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Empirical invariant measure of a periodic model from one long path
/// started at the model's reference point (the origin).
OccupationHistogram pilot_histogram(const DrivingModel& model, const PilotOptions& opts);

// ---------------------------------------------------------------------------
// Carre du champ along paths and limiting covariance
// ---------------------------------------------------------------------------

/// Gamma(w^i, w^j)(x) for all pairs. Spectral for periodic Levy models,
/// pointwise otherwise.
class GammaField {
 public:
  GammaField(const DrivingModel& model, std::vector<PeriodicFunction> w,
             GeneratorOptions opts = {});

  std::size_t components() const { return w_.size(); }
  bool spectral() const { return !spectral_.empty(); }
  Mat operator()(std::span<const double> x) const;
  Mat operator()(const Vec& x) const {
    return (*this)(std::span<const double>(x.data(), x.size()));
  }

 private:
  const DrivingModel* model_;
  std::vector<PeriodicFunction> w_;
  std::vector<PeriodicFunction> spectral_;  // upper triangle, row-major
  GeneratorOptions opts_;
};

struct CovarianceReport {
  Mat sigma;
  Mat c_tilde;
  Mat c;
  std::string method;     // series | quadrature | monte-carlo
  std::string invariant;  // uniform | empirical histogram | none
  bool valid = true;      // false when Re q vanishes on the support of W
  double min_eigenvalue = 0.0;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

struct SeriesOptions {
  FrequencyConvention convention = FrequencyConvention::kPerAxis;
  double eps_zero = 1e-12;
};

/// C~_ij = 2 sum_{k != 0} Re q(xi_k) what^i(k) what^j(-k), exact for
/// band-limited W.
CovarianceReport covariance_series(const DrivingModel& model,
                                   const std::vector<PeriodicFunction>& w, const Mat& sigma,
                                   const SeriesOptions& opts = {});

struct QuadratureCovarianceOptions {
  /// Nodes per axis of the uniform torus grid (used for the uniform measure).
  int grid_per_axis = 512;
  /// Spectral Gamma for constant-coefficient stable models (the pointwise
  /// Taylor split is slower and only reaches ~1e-7).
  bool spectral_stable = true;
  GeneratorOptions generator{};
};

/// C = Sigma + int Gamma(w^i, w^j) d pi over the torus against the uniform
/// measure (grid rule, exact for trigonometric polynomials of low degree).
CovarianceReport covariance_quadrature(const DrivingModel& model,
                                       const std::vector<PeriodicFunction>& w,
                                       const Mat& sigma,
                                       const QuadratureCovarianceOptions& opts = {});

/// Same against an empirical invariant measure (histogram cell centers).
CovarianceReport covariance_quadrature(const DrivingModel& model,
                                       const std::vector<PeriodicFunction>& w,
                                       const Mat& sigma, const OccupationHistogram& invariant,
                                       const QuadratureCovarianceOptions& opts = {});

/// C~ as the time average of Gamma(w^i, w^j)(F_s) along one long pilot
/// path (after burn-in); Gamma is sampled on at most `max_evaluations`
/// grid points. Works without a period.
CovarianceReport covariance_pilot(const DrivingModel& model,
                                  const std::vector<PeriodicFunction>& w, const Mat& sigma,
                                  const PilotOptions& opts,
                                  std::size_t max_evaluations = 20000,
                                  const GeneratorOptions& gen = {});

/// P_ij = (1/|tau|) int w^i A w^j dx by the grid rule with A applied
/// pointwise. For Levy models P = -C~/2.
Mat generator_pairing(const DrivingModel& model, const std::vector<PeriodicFunction>& w,
                      int grid_per_axis = 512, const GeneratorOptions& opts = {});

/// C~^n_t = n^{-1} int_0^{nt} Gamma(F_s) ds for each t in `times`
/// (trapezoid with linear interpolation in the last cell).
std::vector<Mat> modified_characteristics(const PathSample& path, const GammaField& gamma,
                                          double n, const std::vector<double>& times);

// ---------------------------------------------------------------------------
// Strong-ergodicity diagnostic
// ---------------------------------------------------------------------------

struct TvDecayOptions {
  int starts_per_axis = 8;
  std::size_t paths_per_start = 10000;
  int bins_per_axis = 32;
  /// Highest Fourier mode in the characteristic-function bound.
  int fourier_modes = 64;
  std::vector<double> times = {0.0, 1.0, 2.0, 5.0, 10.0};
  double dt = 1e-2;  // Euler step for non-Levy models
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct TvDecayReport {
  std::vector<double> times;
  std::vector<double> tv;           // sup over starts of the TV estimate
  std::vector<double> tv_binned;    // histogram part
  std::vector<double> tv_fourier;   // characteristic-function part
  std::vector<double> noise_floor;  // split-half distance
  double lambda = 0.0;
  double big_lambda = 0.0;
  int fitted_points = 0;
  bool non_decaying = false;
  std::string reference;  // uniform | pooled
  std::vector<std::string> warnings;
};

/// Sup-over-starts distance between the torus marginals at each ladder
/// time and the invariant law, with an exponential fit Lambda e^{-lambda t}.
/// The estimate is the larger of the binned TV and the lower bound
/// (1/2) max_{0<|k|<=K} |phi_t(k) - phi_pi(k)|, which sees lattice-supported
/// laws that coarse bins smear out.
TvDecayReport tv_decay_estimate(const DrivingModel& model, const TvDecayOptions& opts);

}  // namespace tracer
