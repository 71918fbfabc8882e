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
#include <string>
#include <vector>

#include "tracer/linalg.hpp"
#include "tracer/simulate.hpp"

namespace tracer {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_survival(double lambda);

/// One-sample KS with the Stephens-corrected asymptotic p-value.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample KS, effective size n1 n2 / (n1 + n2).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

double normal_cdf(double x, double mean = 0.0, double variance = 1.0);

/// Sample mean and 1/(N-1) covariance; both need at least 2 samples.
Vec empirical_mean(const std::vector<Vec>& samples);
Mat empirical_covariance(const std::vector<Vec>& samples);
/// Elementwise standard error of the sample covariance,
/// sqrt((m4_ij - s_ij^2) / N) with m4_ij = mean of (x_i - xbar_i)^2 (x_j - xbar_j)^2.
Mat covariance_standard_error(const std::vector<Vec>& samples);

struct JumpCapResult {
  double max_rescaled_increment = 0.0;
  double cap = 0.0;    // 2 max_i sup|w^i| / sqrt(n)
  double bound = 0.0;  // cap + sup|v| dt / sqrt(n)
  std::size_t jumps = 0;
  bool pass = true;
};

struct EnsembleStats {
  std::size_t count = 0;
  Vec mean;
  Mat covariance;
  Vec mean_stderr;
  Mat covariance_stderr;
  std::vector<KsResult> ks;  // one per marginal
  JumpCapResult jump_cap;
};

EnsembleStats summarize(const std::vector<Vec>& samples);

// ---------------------------------------------------------------------------
// Law of large numbers
// ---------------------------------------------------------------------------

struct LlnOptions {
  std::vector<double> n_ladder = {250.0, 1000.0, 4000.0};
  double t = 1.0;
  std::size_t n_paths = 200;
  double dt = 1e-2;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct LlnRung {
  double n = 0.0;
  double mean_deviation = 0.0;  // mean over paths of |X_{nt}/n - D t|
  double standard_error = 0.0;
  double max_deviation = 0.0;
};

struct LlnReport {
  std::vector<LlnRung> rungs;
  double slope = 0.0;  // log-log fit of mean deviation against n
  bool strictly_decreasing = false;
  std::string centering;  // "mean" (point-mass drift law) or "conditional"
};

/// All rungs reuse the same paths, simulated to max(n) * t.
LlnReport lln_experiment(const TracerModel& tm, const LlnOptions& opts);

// ---------------------------------------------------------------------------
// Central limit theorem
// ---------------------------------------------------------------------------

struct CltOptions {
  double n = 2000.0;
  std::vector<double> t_grid = {1.0};
  std::size_t n_paths = 400;
  double dt = 1e-2;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double tol_cov = 0.10;
  double p_min = 0.01;
};

struct CltRow {
  double t = 0.0;
  EnsembleStats stats;   // of S_n(t), centered per path by D t
  Mat theoretical;       // t C
  double relative_error = 0.0;  // max-norm, relative to max |t C|
  bool within_3se = true;
  double min_ks_p = 1.0;
  EnsembleStats unconditional;  // centered by the mean drift instead
};

struct CltReport {
  std::vector<CltRow> rows;
  bool pass = false;
  /// max/min of Var(S_n(t))/t over the grid, minus one (per marginal max).
  double linearity_spread = 0.0;
  JumpCapResult jump_cap;
  std::vector<std::string> notes;
};

/// S_n(t) = n^{-1/2} (X_{nt} - n D t) compared with N(0, t C).
CltReport clt_experiment(const TracerModel& tm, const Mat& c, const CltOptions& opts);

/// Largest grid increment of n^{-1/2} (w(F_t) - int_0^t A w(F_s) ds) over a
/// path at scale n, compared with the cap 2 sup|w| / sqrt(n).
JumpCapResult jump_cap_check(const TracerPath& path, const TracerModel& tm, double n);
JumpCapResult merge(const JumpCapResult& a, const JumpCapResult& b);

// ---------------------------------------------------------------------------
// Dynkin martingale check
// ---------------------------------------------------------------------------

struct DynkinReport {
  std::vector<double> mean;    // per test function
  std::vector<double> standard_error;
  /// |mean Richardson estimate| of the trapezoid bias, (I_h - I_2h) / 3.
  std::vector<double> discretization;
  std::vector<double> z;       // mean / hypot(stderr, discretization)
  double max_abs_z = 0.0;
};

/// Monte Carlo mean of w(F_T) - w(F_0) - int_0^T A w(F_s) ds under the
/// tracer's initial law.
DynkinReport dynkin_check(const TracerModel& tm, double horizon, std::size_t n_paths,
                          double dt, std::uint64_t seed, unsigned workers = 1);

}  // namespace tracer
