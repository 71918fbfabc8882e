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
#include <string>
#include <variant>
#include <vector>

#include "tracer/fields.hpp"
#include "tracer/linalg.hpp"
#include "tracer/quadrature.hpp"
#include "tracer/rng.hpp"
#include "tracer/torus.hpp"

namespace tracer {

// ---------------------------------------------------------------------------
// Jump measures
// ---------------------------------------------------------------------------

struct Atom {
  Vec location;
  double rate = 0.0;
};

/// nu = sum_k rate_k delta_{y_k}; state independent.
struct AtomicJumps {
  std::vector<Atom> atoms;
};

struct GaussianComponent {
  double weight = 1.0;
  Vec mean;
  Vec stddev;  // diagonal covariance
};

struct GaussianMixtureLaw {
  std::vector<GaussianComponent> components;
};

struct UniformBoxLaw {
  Vec lo;
  Vec hi;
};

/// A jump law known only through its sampler. Symbol and generator
/// evaluation reject it.
struct SamplerLaw {
  std::function<void(Rng&, std::span<double>)> sample;
  bool symmetric = false;
};

using JumpLaw = std::variant<GaussianMixtureLaw, UniformBoxLaw, SamplerLaw>;

/// nu(x, dy) = rate(x) * law(dy), a finite-activity measure.
struct DensityJumps {
  ScalarField rate;
  JumpLaw law;
};

/// Rotationally symmetric stable(-like) measure with symbol
/// gamma(x) |xi|^alpha(x).
struct StableJumps {
  ScalarField alpha;
  ScalarField gamma;
};

struct NoJumps {};

using JumpMeasure =
    std::variant<NoJumps, AtomicJumps, DensityJumps, StableJumps>;

/// Density of `law` at y (throws UnsupportedError for sampler-only laws).
double jump_law_density(const JumpLaw& law, const Vec& y);
/// Draws a nonzero jump from `law`.
void sample_jump_law(const JumpLaw& law, Rng& rng, std::span<double> out);
bool jump_law_has_density(const JumpLaw& law);

/// Normalizing constant of the isotropic stable Levy density: the measure
/// C(d, alpha) |y|^{-d-alpha} dy has symbol |xi|^alpha.
double stable_levy_constant(int dimension, double alpha);

/// Integrates g(y) * law(dy) by adaptive quadrature over each component's
/// support box. `components` is the size of g's output.
std::vector<double> integrate_against_law(
    const JumpLaw& law, const std::function<void(const Vec&, std::span<double>)>& g,
    std::size_t components, Integrator& integrator);

// ---------------------------------------------------------------------------
// Driving model
// ---------------------------------------------------------------------------

/// Sup-bounds of the coefficients over a probe grid.
struct CoefficientBounds {
  double drift = 0.0;
  double diffusion = 0.0;
  double jump_activity = 0.0;  // sup_x int min(1, |y|^2) nu(x, dy)
  double jump_rate = 0.0;      // sup_x nu(x, R^d); +inf for stable
};

/// State-dependent Levy triplet (b(x), c(x), nu(x, dy)) with optional period.
/// The killing term is identically zero by construction. Immutable after
/// construction, so safe for concurrent reads.
class DrivingModel {
 public:
  struct Spec {
    int dimension = 1;
    std::vector<ScalarField> drift;      // dimension entries
    std::vector<ScalarField> diffusion;  // dimension^2 entries, row-major
    JumpMeasure jumps = NoJumps{};
    std::optional<Vec> period;
    std::string name;
  };

  explicit DrivingModel(Spec spec,
                        const QuadratureOptions& quad = QuadratureOptions{});

  int dimension() const { return spec_.dimension; }
  const std::string& name() const { return spec_.name; }
  bool is_levy() const { return levy_; }
  bool is_periodic() const { return spec_.period.has_value(); }
  const std::optional<Vec>& period() const { return spec_.period; }
  const JumpMeasure& jumps() const { return spec_.jumps; }
  const QuadratureOptions& quadrature() const { return quad_; }

  Vec drift(const Vec& x) const;
  void drift_into(std::span<const double> x, std::span<double> out) const;
  Mat diffusion(const Vec& x) const;
  bool has_diffusion() const { return has_diffusion_; }
  /// Total jump intensity nu(x, R^d); +inf for stable measures.
  double jump_rate(const Vec& x) const;
  /// int_{|y| <= 1} y nu(x, dy) for finite-activity measures (0 for stable).
  Vec small_jump_mean(const Vec& x) const;
  /// b(x) - int_{|y|<=1} y nu(x, dy): drift of the uncompensated jump form.
  Vec effective_drift(const Vec& x) const;
  double stable_alpha(const Vec& x) const;
  double stable_gamma(const Vec& x) const;

  /// Zero drift and symmetric jump measure.
  bool is_symmetric() const { return symmetric_; }
  const CoefficientBounds& bounds() const { return bounds_; }

  /// Points at which invariants and conditions are spot-checked.
  std::vector<Vec> probe_points(int per_axis = 5) const;

 private:
  void validate();

  Spec spec_;
  QuadratureOptions quad_;
  bool levy_ = false;
  bool symmetric_ = false;
  bool has_diffusion_ = false;
  CoefficientBounds bounds_;
  Vec law_small_mean_;  // int_{|y|<=1} y law(dy) for DensityJumps
  double law_truncated_second_ = 0.0;
  double levy_rate_ = 0.0;
  Vec levy_effective_drift_;
};

// ---------------------------------------------------------------------------
// Symbol and analytic conditions
// ---------------------------------------------------------------------------

struct SymbolValue {
  Complex q;
  double quadratic = 0.0;   // (1/2) <xi, c xi>
  double jump_real = 0.0;   // int (1 - cos<xi,y>) nu(dy)
  double drift_imag = 0.0;  // -<xi, b>
  double jump_imag = 0.0;   // -int (sin<xi,y> - <xi,y> 1_{|y|<=1}) nu(dy)
};

SymbolValue eval_symbol(const DrivingModel& model, const Vec& x,
                        const Vec& xi);

/// q(2 pi k / tau) for a Levy model (x is irrelevant).
Complex lattice_symbol(const DrivingModel& model, const LatticePoint& k,
                       FrequencyConvention conv = FrequencyConvention::kPerAxis);

/// Nonzero lattice points with |k|_inf <= k_max, ordered by shell and then
/// lexicographically descending (so k = 1 precedes k = -1).
std::vector<LatticePoint> lattice_shells(int dimension, int k_max);

struct ErgodicityCheck {
  enum class Verdict { kPass, kFail, kInconclusive };
  Verdict verdict = Verdict::kPass;
  std::optional<LatticePoint> k0;  // first offending lattice point
  double min_re_q = 0.0;
  LatticePoint argmin;
  int k_max = 0;
  FrequencyConvention convention = FrequencyConvention::kPerAxis;
};

/// Strict positivity of Re q on the nonzero dual lattice up to radius k_max.
ErgodicityCheck check_ergodicity_condition(
    const DrivingModel& model, int k_max,
    FrequencyConvention conv = FrequencyConvention::kPerAxis,
    double eps_zero = 1e-12);

struct StrongErgodicityHint {
  bool not_strongly_ergodic = false;
  double first_shell_min = 0.0;
  double outer_min = 0.0;  // min over shells k_max/2 < |k| <= k_max
  LatticePoint outer_argmin;
  std::vector<double> shell_min;  // index r-1 -> min over shell r
};

/// Flags symbols whose real part on the dual lattice returns arbitrarily
/// close to zero at high frequency (liminf Re q = 0), which rules out a
/// uniform spectral gap for the torus projection.
StrongErgodicityHint check_strong_ergodicity_hint(
    const DrivingModel& model, int k_max, double ratio_tol = 0.05,
    FrequencyConvention conv = FrequencyConvention::kPerAxis);

struct SummabilityReport {
  enum class Verdict { kPassFiniteSupport, kSlowDecay, kFail };
  Verdict verdict = Verdict::kPassFiniteSupport;
  std::vector<double> shell_contribution;  // index r-1
  std::vector<double> partial_sums;
  double total = 0.0;
  std::optional<double> raabe;  // r (s_{r-1}/s_r - 1) on the last shells
  std::optional<LatticePoint> k0;
};

SummabilityReport check_summability(
    const PeriodicFunction& w, const DrivingModel& model, int k_max,
    FrequencyConvention conv = FrequencyConvention::kPerAxis,
    double eps_zero = 1e-12);

struct SectorCheck {
  bool pass = false;
  double c = 0.0;
  std::optional<Vec> worst_xi;
};

SectorCheck check_sector_condition(const DrivingModel& model,
                                   const std::vector<Vec>& probe_x,
                                   const std::vector<Vec>& probe_xi,
                                   double eps_zero = 1e-12);

struct HeatKernelReport {
  enum class Verdict { kIntegrable, kNonIntegrable, kInconclusive };
  Verdict verdict = Verdict::kInconclusive;
  double integral = 0.0;       // over |xi| <= R
  double tail_fraction = 0.0;  // share of the integral from R/2 < |xi| <= R
  double tail_value = 0.0;     // radial integrand at R
  double tail_floor = 0.0;     // min of the radial integrand on [R/2, R]
  double decay_rate = 0.0;     // -d log g / d log r fitted on [R/2, R]
  std::vector<double> radii;
  std::vector<double> integrand;
};

HeatKernelReport check_heat_kernel_integrability(
    const DrivingModel& model, double t, double cutoff,
    const std::vector<Vec>& probe_x, int radial_points = 2001);

/// Conservativeness: q(x, 0) = 0 at every probe.
bool check_conservative(const DrivingModel& model,
                        const std::vector<Vec>& probe_x);

const char* to_string(ErgodicityCheck::Verdict v);
const char* to_string(SummabilityReport::Verdict v);
const char* to_string(HeatKernelReport::Verdict v);

}  // namespace tracer
