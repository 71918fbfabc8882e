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

#include "tracer/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tracer/error.hpp"

namespace tracer {

double birkhoff_average(const PathSample& path,
                        const std::function<double(std::span<const double>)>& f) {
  if (path.states.empty()) throw ModelError("empty path");
  if (path.steps == 0) return f(path.state(0));
  double acc = 0.5 * (f(path.state(0)) + f(path.state(path.steps)));
  for (std::size_t m = 1; m < path.steps; ++m) acc += f(path.state(m));
  return acc / static_cast<double>(path.steps);
}

double birkhoff_average(const PathSample& path, const PeriodicFunction& f) {
  return birkhoff_average(path, [&f](std::span<const double> x) { return f.evaluate(x); });
}

// ---------------------------------------------------------------------------

OccupationHistogram::OccupationHistogram(Vec period, std::vector<int> bins)
    : period_(std::move(period)), bins_(std::move(bins)) {
  if (period_.size() == 0 || static_cast<std::size_t>(period_.size()) != bins_.size()) {
    throw ModelError("histogram needs one bin count per period axis");
  }
  std::size_t cells = 1;
  for (Eigen::Index j = 0; j < period_.size(); ++j) {
    if (!(period_(j) > 0.0)) throw ModelError("histogram period must be positive");
    const int b = bins_[static_cast<std::size_t>(j)];
    if (b < 1) throw ModelError("histogram needs at least one bin per axis");
    cells *= static_cast<std::size_t>(b);
    if (cells > (std::size_t{1} << 26)) throw ModelError("histogram too large");
  }
  counts_.assign(cells, 0.0);
}

OccupationHistogram::OccupationHistogram(Vec period, int bins_per_axis)
    : OccupationHistogram(period, std::vector<int>(static_cast<std::size_t>(period.size()),
                                                   bins_per_axis)) {}

std::size_t OccupationHistogram::cell_of(std::span<const double> p) const {
  std::size_t cell = 0;
  for (std::size_t j = 0; j < bins_.size(); ++j) {
    const double tau = period_(static_cast<Eigen::Index>(j));
    double u = std::fmod(p[j], tau);
    if (u < 0.0) u += tau;
    auto idx = static_cast<long>(std::floor(u / tau * bins_[j]));
    idx = std::clamp<long>(idx, 0, bins_[j] - 1);
    cell = cell * static_cast<std::size_t>(bins_[j]) + static_cast<std::size_t>(idx);
  }
  return cell;
}

Vec OccupationHistogram::cell_center(std::size_t cell) const {
  Vec x(period_.size());
  for (std::size_t j = bins_.size(); j-- > 0;) {
    const auto b = static_cast<std::size_t>(bins_[j]);
    const auto jj = static_cast<Eigen::Index>(j);
    x(jj) = period_(jj) * (static_cast<double>(cell % b) + 0.5) / static_cast<double>(b);
    cell /= b;
  }
  return x;
}

void OccupationHistogram::add(std::span<const double> p, double weight) {
  if (p.size() != bins_.size()) throw ModelError("histogram point dimension mismatch");
  if (weight < 0.0) throw ModelError("histogram weights must be nonnegative");
  counts_[cell_of(p)] += weight;
  mass_ += weight;
}

void OccupationHistogram::merge(const OccupationHistogram& other) {
  if (other.bins_ != bins_ || (other.period_ - period_).cwiseAbs().maxCoeff() > 0.0) {
    throw ModelError("histogram grids differ");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  mass_ += other.mass_;
}

std::vector<double> OccupationHistogram::probabilities() const {
  if (!(mass_ > 0.0)) throw ModelError("histogram is empty");
  std::vector<double> p(counts_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = counts_[i] / mass_;
  return p;
}

double OccupationHistogram::tv_to_uniform() const {
  const auto p = probabilities();
  const double u = 1.0 / static_cast<double>(p.size());
  double acc = 0.0;
  for (double v : p) acc += std::abs(v - u);
  return 0.5 * acc;
}

double OccupationHistogram::tv(const OccupationHistogram& other) const {
  if (other.bins_ != bins_) throw ModelError("histogram grids differ");
  const auto p = probabilities();
  const auto q = other.probabilities();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return 0.5 * acc;
}

OccupationHistogram occupation_histogram(const PathSample& path, int bins_per_axis,
                                         double burn_in) {
  if (!path.has_torus()) throw ModelError("occupation histogram needs a periodic model");
  OccupationHistogram h(path.period, bins_per_axis);
  if (path.steps == 0) {
    h.add(path.torus_state(0), 1.0);
    return h;
  }
  const auto first = static_cast<std::size_t>(std::ceil(burn_in / path.dt - 1e-9));
  if (first >= path.steps) throw ModelError("burn-in covers the whole path");
  for (std::size_t m = first; m < path.steps; ++m) {
    h.add(path.torus_state(m), 0.5 * path.dt);
    h.add(path.torus_state(m + 1), 0.5 * path.dt);
  }
  return h;
}

OccupationHistogram pilot_histogram(const DrivingModel& model, const PilotOptions& opts) {
  if (!model.period()) throw ModelError("pilot run needs a periodic model");
  if (!(opts.burn_in_fraction >= 0.0 && opts.burn_in_fraction < 1.0)) {
    throw ModelError("burn-in fraction must lie in [0, 1)");
  }
  Rng rng(opts.seed, opts.stream);
  const PathSample path =
      simulate_path(model, Vec::Zero(model.dimension()), opts.dt, opts.horizon, rng);
  return occupation_histogram(path, opts.bins_per_axis, opts.burn_in_fraction * opts.horizon);
}

// ---------------------------------------------------------------------------

GammaField::GammaField(const DrivingModel& model, std::vector<PeriodicFunction> w,
                       GeneratorOptions opts)
    : model_(&model), w_(std::move(w)), opts_(opts) {
  if (w_.empty()) throw ModelError("Gamma needs at least one function");
  if (model.is_levy() && model.period()) {
    for (std::size_t i = 0; i < w_.size(); ++i) {
      for (std::size_t j = i; j < w_.size(); ++j) {
        spectral_.push_back(carre_du_champ_spectral(model, w_[i], w_[j]));
      }
    }
  }
}

Mat GammaField::operator()(std::span<const double> x) const {
  const auto d = static_cast<Eigen::Index>(w_.size());
  Mat g(d, d);
  std::size_t idx = 0;
  Vec xv;
  if (!spectral()) xv = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j, ++idx) {
      const double v =
          spectral() ? spectral_[idx].evaluate(x)
                     : carre_du_champ(*model_, w_[static_cast<std::size_t>(i)],
                                      w_[static_cast<std::size_t>(j)], xv, opts_);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

namespace {

void check_functions(const DrivingModel& model, const std::vector<PeriodicFunction>& w,
                     const Mat& sigma) {
  if (w.empty()) throw ModelError("covariance needs at least one test function");
  const auto d = static_cast<Eigen::Index>(w.size());
  if (sigma.rows() != d || sigma.cols() != d) throw ModelError("Sigma must be d x d");
  if (!is_symmetric(sigma)) throw ModelError("Sigma must be symmetric");
  for (const auto& f : w) {
    if (f.dimension() != model.dimension()) throw ModelError("test function dimension mismatch");
    if (model.period() &&
        (f.period() - *model.period()).cwiseAbs().maxCoeff() >
            1e-12 * model.period()->cwiseAbs().maxCoeff()) {
      throw ModelError("test function period differs from the model period");
    }
  }
}

void finish_report(CovarianceReport& r) {
  r.c_tilde = 0.5 * (r.c_tilde + r.c_tilde.transpose());
  r.c = r.sigma + r.c_tilde;
  r.min_eigenvalue = min_eigenvalue(r.c_tilde);
  if (r.min_eigenvalue < -1e-10) {
    r.notes.push_back("C~ is not positive semidefinite");
  }
}

std::size_t grid_nodes_per_axis(int requested, int dimension) {
  if (requested < 2) throw ModelError("quadrature grid needs at least 2 nodes per axis");
  // Keep the tensor grid within 2^20 nodes.
  const double cap = std::floor(std::pow(double(1 << 20), 1.0 / dimension) + 1e-9);
  return static_cast<std::size_t>(std::min<double>(requested, cap));
}

}  // namespace

CovarianceReport covariance_series(const DrivingModel& model,
                                   const std::vector<PeriodicFunction>& w, const Mat& sigma,
                                   const SeriesOptions& opts) {
  if (!model.is_levy()) throw UnsupportedError("series covariance needs a Levy model");
  if (!model.period()) throw ModelError("series covariance needs a period");
  check_functions(model, w, sigma);
  const auto d = static_cast<Eigen::Index>(w.size());

  // Union of the supports, k = 0 excluded.
  std::vector<LatticePoint> support;
  for (const auto& f : w) {
    for (const auto& t : f.terms()) {
      if (std::all_of(t.k.begin(), t.k.end(), [](int v) { return v == 0; })) continue;
      if (std::find(support.begin(), support.end(), t.k) == support.end()) {
        support.push_back(t.k);
      }
    }
  }
  std::sort(support.begin(), support.end());

  CovarianceReport r;
  r.method = "series";
  r.invariant = "uniform";
  r.sigma = sigma;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
  double scale = 0.0;
  double min_re = std::numeric_limits<double>::infinity();
  for (const auto& k : support) {
    const Complex q = lattice_symbol(model, k, opts.convention);
    min_re = std::min(min_re, q.real());
    if (q.real() <= opts.eps_zero && r.valid) {
      r.valid = false;
      std::string ks;
      for (int v : k) ks += (ks.empty() ? "" : ",") + std::to_string(v);
      r.notes.push_back("ergodicity condition fails on the support at k = (" + ks + ")");
    }
    LatticePoint neg(k.size());
    std::transform(k.begin(), k.end(), neg.begin(), [](int v) { return -v; });
    for (Eigen::Index i = 0; i < d; ++i) {
      const Complex wi = w[static_cast<std::size_t>(i)].coefficient(k);
      for (Eigen::Index j = 0; j < d; ++j) {
        const Complex term = 2.0 * q.real() * wi * w[static_cast<std::size_t>(j)].coefficient(neg);
        acc(i, j) += term;
        scale += std::abs(term);
      }
    }
  }
  const double imag = acc.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-12 * std::max(1.0, scale)) {
    throw NumericalError("series covariance has a non-negligible imaginary part");
  }
  r.c_tilde = acc.real();
  r.diagnostics["support_size"] = static_cast<double>(support.size());
  r.diagnostics["imaginary_residual"] = imag;
  r.diagnostics["min_re_q_on_support"] = support.empty() ? 0.0 : min_re;
  finish_report(r);
  return r;
}

namespace {

CovarianceReport quadrature_report(const DrivingModel& model,
                                   const std::vector<PeriodicFunction>& w, const Mat& sigma,
                                   const std::vector<std::pair<Vec, double>>& nodes,
                                   const QuadratureCovarianceOptions& opts) {
  const auto d = static_cast<Eigen::Index>(w.size());
  const bool stable = std::holds_alternative<StableJumps>(model.jumps());
  const bool spectral = stable && opts.spectral_stable && model.is_levy() && model.period();
  std::vector<PeriodicFunction> gamma_spec;
  if (spectral) {
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i; j < d; ++j) {
        gamma_spec.push_back(carre_du_champ_spectral(model, w[static_cast<std::size_t>(i)],
                                                     w[static_cast<std::size_t>(j)]));
      }
    }
  }
  Mat acc = Mat::Zero(d, d);
  for (const auto& [x, weight] : nodes) {
    std::size_t idx = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i; j < d; ++j, ++idx) {
        const double g = spectral ? gamma_spec[idx](x)
                                  : carre_du_champ(model, w[static_cast<std::size_t>(i)],
                                                   w[static_cast<std::size_t>(j)], x,
                                                   opts.generator);
        acc(i, j) += weight * g;
      }
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) acc(i, j) = acc(j, i);
  }
  CovarianceReport r;
  r.method = "quadrature";
  r.sigma = sigma;
  r.c_tilde = acc;
  r.diagnostics["nodes"] = static_cast<double>(nodes.size());
  if (spectral) r.notes.push_back("spectral carre du champ on the grid");
  return r;
}

}  // namespace

CovarianceReport covariance_quadrature(const DrivingModel& model,
                                       const std::vector<PeriodicFunction>& w,
                                       const Mat& sigma,
                                       const QuadratureCovarianceOptions& opts) {
  if (!model.period()) throw ModelError("torus quadrature needs a periodic model");
  check_functions(model, w, sigma);
  const std::size_t per_axis = grid_nodes_per_axis(opts.grid_per_axis, model.dimension());
  const TorusGrid grid(*model.period(),
                       std::vector<int>(static_cast<std::size_t>(model.dimension()),
                                        static_cast<int>(per_axis)));
  std::vector<std::pair<Vec, double>> nodes;
  nodes.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) nodes.emplace_back(grid.point(i), grid.weight());
  CovarianceReport r = quadrature_report(model, w, sigma, nodes, opts);
  r.invariant = "uniform";
  r.diagnostics["grid_per_axis"] = static_cast<double>(per_axis);
  if (!model.is_levy()) {
    r.notes.push_back("uniform measure assumed for a state-dependent model");
  }
  finish_report(r);
  return r;
}

CovarianceReport covariance_quadrature(const DrivingModel& model,
                                       const std::vector<PeriodicFunction>& w,
                                       const Mat& sigma, const OccupationHistogram& invariant,
                                       const QuadratureCovarianceOptions& opts) {
  if (!model.period()) throw ModelError("torus quadrature needs a periodic model");
  check_functions(model, w, sigma);
  if (invariant.dimension() != model.dimension() ||
      (invariant.period() - *model.period()).cwiseAbs().maxCoeff() >
          1e-12 * model.period()->cwiseAbs().maxCoeff()) {
    throw ModelError("histogram grid does not match the model torus");
  }
  const auto p = invariant.probabilities();
  std::vector<std::pair<Vec, double>> nodes;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > 0.0) nodes.emplace_back(invariant.cell_center(c), p[c]);
  }
  CovarianceReport r = quadrature_report(model, w, sigma, nodes, opts);
  r.invariant = "empirical histogram";
  r.diagnostics["histogram_cells"] = static_cast<double>(p.size());
  r.diagnostics["histogram_mass"] = invariant.mass();
  finish_report(r);
  return r;
}

CovarianceReport covariance_pilot(const DrivingModel& model,
                                  const std::vector<PeriodicFunction>& w, const Mat& sigma,
                                  const PilotOptions& opts, std::size_t max_evaluations,
                                  const GeneratorOptions& gen) {
  check_functions(model, w, sigma);
  if (!(opts.burn_in_fraction >= 0.0 && opts.burn_in_fraction < 1.0)) {
    throw ModelError("burn-in fraction must lie in [0, 1)");
  }
  if (max_evaluations < 2) throw ModelError("pilot needs at least two Gamma evaluations");
  Rng rng(opts.seed, opts.stream);
  const PathSample path =
      simulate_path(model, Vec::Zero(model.dimension()), opts.dt, opts.horizon, rng);
  const GammaField gamma(model, w, gen);
  const auto first =
      static_cast<std::size_t>(std::ceil(opts.burn_in_fraction * opts.horizon / opts.dt - 1e-9));
  if (first >= path.steps) throw ModelError("burn-in covers the whole pilot path");
  const std::size_t span = path.steps - first;
  const std::size_t stride = std::max<std::size_t>(1, span / (max_evaluations - 1));
  const auto d = static_cast<Eigen::Index>(w.size());
  Mat acc = Mat::Zero(d, d);
  std::size_t count = 0;
  for (std::size_t m = first; m <= path.steps; m += stride) {
    acc += gamma(path.state(m));
    ++count;
  }
  CovarianceReport r;
  r.method = "monte-carlo";
  r.invariant = "pilot path";
  r.sigma = sigma;
  r.c_tilde = acc / static_cast<double>(count);
  r.diagnostics["pilot_horizon"] = opts.horizon;
  r.diagnostics["burn_in_fraction"] = opts.burn_in_fraction;
  r.diagnostics["evaluations"] = static_cast<double>(count);
  r.notes.push_back("Birkhoff average of the carre du champ along one pilot path");
  finish_report(r);
  return r;
}

Mat generator_pairing(const DrivingModel& model, const std::vector<PeriodicFunction>& w,
                      int grid_per_axis, const GeneratorOptions& opts) {
  if (!model.period()) throw ModelError("pairing needs a periodic model");
  check_functions(model, w, Mat::Zero(static_cast<Eigen::Index>(w.size()),
                                      static_cast<Eigen::Index>(w.size())));
  const std::size_t per_axis = grid_nodes_per_axis(grid_per_axis, model.dimension());
  const TorusGrid grid(*model.period(),
                       std::vector<int>(static_cast<std::size_t>(model.dimension()),
                                        static_cast<int>(per_axis)));
  const auto d = static_cast<Eigen::Index>(w.size());
  Mat acc = Mat::Zero(d, d);
  Vec aw(d), wv(d);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Vec x = grid.point(n);
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto& f = w[static_cast<std::size_t>(i)];
      wv(i) = f(x);
      aw(i) = apply_pointwise(model, f, x, opts);
    }
    acc += wv * aw.transpose();
  }
  return acc * grid.weight();
}

std::vector<Mat> modified_characteristics(const PathSample& path, const GammaField& gamma,
                                          double n, const std::vector<double>& times) {
  if (!(n > 0.0)) throw ModelError("scale n must be positive");
  if (path.states.empty()) throw ModelError("empty path");
  double t_max = 0.0;
  for (double t : times) {
    if (!(t >= 0.0)) throw ModelError("times must be nonnegative");
    t_max = std::max(t_max, t);
  }
  if (n * t_max > path.horizon() * (1.0 + 1e-12)) {
    throw ModelError("path horizon is shorter than n * t_max");
  }
  const auto d = static_cast<Eigen::Index>(gamma.components());
  const std::size_t needed =
      std::min<std::size_t>(path.steps, static_cast<std::size_t>(std::ceil(n * t_max / path.dt - 1e-9)));

  // Cumulative trapezoid integral at every grid point up to `needed`.
  std::vector<Mat> cumulative(needed + 1, Mat::Zero(d, d));
  Mat prev = gamma(path.state(0));
  for (std::size_t m = 1; m <= needed; ++m) {
    Mat cur = gamma(path.state(m));
    cumulative[m] = cumulative[m - 1] + 0.5 * path.dt * (prev + cur);
    prev = std::move(cur);
  }
  std::vector<Mat> out;
  out.reserve(times.size());
  for (double t : times) {
    const double s = n * t / path.dt;
    auto lo = static_cast<std::size_t>(std::floor(s));
    if (lo >= needed) {
      out.push_back(cumulative[needed] / n);
      continue;
    }
    const double frac = s - static_cast<double>(lo);
    out.push_back(((1.0 - frac) * cumulative[lo] + frac * cumulative[lo + 1]) / n);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Half of the nonzero dual lattice (one of each +-k pair) with |k|_inf <= K.
std::vector<LatticePoint> half_lattice(int dimension, int k_max) {
  std::vector<LatticePoint> out;
  for (const auto& k : lattice_shells(dimension, k_max)) {
    const auto first = std::find_if(k.begin(), k.end(), [](int v) { return v != 0; });
    if (*first > 0) out.push_back(k);
  }
  return out;
}

struct EnsembleSnapshot {
  OccupationHistogram hist;
  std::vector<Complex> phi;
};

EnsembleSnapshot snapshot(const std::vector<const double*>& points, int dim, const Vec& period,
                          int bins, const std::vector<Vec>& freqs) {
  EnsembleSnapshot s{OccupationHistogram(period, bins), std::vector<Complex>(freqs.size())};
  const auto d = static_cast<std::size_t>(dim);
  for (const double* p : points) {
    s.hist.add(std::span<const double>(p, d));
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      double phase = 0.0;
      for (std::size_t j = 0; j < d; ++j) phase += freqs[f](static_cast<Eigen::Index>(j)) * p[j];
      s.phi[f] += Complex(std::cos(phase), std::sin(phase));
    }
  }
  const double inv = 1.0 / static_cast<double>(points.size());
  for (auto& v : s.phi) v *= inv;
  return s;
}

double fourier_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return 0.5 * m;
}

}  // namespace

TvDecayReport tv_decay_estimate(const DrivingModel& model, const TvDecayOptions& opts) {
  if (!model.period()) throw ModelError("TV decay needs a periodic model");
  if (opts.times.empty()) throw ModelError("TV decay needs at least one ladder time");
  if (opts.paths_per_start < 8) throw ModelError("TV decay needs at least 8 paths per start");
  if (opts.starts_per_axis < 1) throw ModelError("TV decay needs at least one start");
  std::vector<double> times = opts.times;
  for (std::size_t r = 0; r < times.size(); ++r) {
    if (!(times[r] >= 0.0) || (r > 0 && !(times[r] > times[r - 1]))) {
      throw ModelError("ladder times must be nonnegative and increasing");
    }
  }
  const Vec& period = *model.period();
  const int dim = model.dimension();
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t rungs = times.size();

  TvDecayReport rep;
  rep.times = times;
  if (opts.paths_per_start < 1000) {
    rep.warnings.push_back("fewer than 1000 paths per start; histograms are noisy");
  }

  const TorusGrid starts(period, std::vector<int>(d, opts.starts_per_axis));
  const std::size_t n_starts = starts.size();
  const std::size_t per = opts.paths_per_start;

  // Non-Levy rungs are reached with the Euler scheme on the dt grid.
  if (!model.is_levy()) {
    for (std::size_t r = 0; r < rungs; ++r) {
      const double gap = times[r] - (r == 0 ? 0.0 : times[r - 1]);
      if (gap > 0.0) (void)grid_steps(opts.dt, gap);
    }
  }

  EnsembleSpec spec;
  spec.n_paths = n_starts * per;
  spec.seed = opts.seed;
  spec.workers = opts.workers;
  auto positions = run_ensemble(spec, [&](std::size_t i, Rng& rng) {
    std::vector<double> out(rungs * d);
    Vec x = starts.point(i / per);
    double t = 0.0;
    for (std::size_t r = 0; r < rungs; ++r) {
      const double gap = times[r] - t;
      if (gap > 0.0) {
        if (model.is_levy()) {
          levy_increment(model, gap, rng, std::span<double>(x.data(), d));
        } else {
          const PathSample p = feller_path(model, x, opts.dt, gap, rng);
          const auto last = p.state(p.steps);
          std::copy(last.begin(), last.end(), x.data());
        }
      }
      t = times[r];
      project_into(std::span<const double>(x.data(), d), period,
                   std::span<double>(out.data() + r * d, d));
    }
    return out;
  });

  const auto lattice = half_lattice(dim, dim == 1 ? opts.fourier_modes
                                                  : std::min(opts.fourier_modes, 8));
  std::vector<Vec> freqs;
  freqs.reserve(lattice.size());
  for (const auto& k : lattice) freqs.push_back(dual_frequency(k, period));

  auto points_for = [&](std::size_t start, std::size_t r, std::size_t from, std::size_t to) {
    std::vector<const double*> pts;
    pts.reserve(to - from);
    for (std::size_t p = from; p < to; ++p) {
      pts.push_back(positions[start * per + p].data() + r * d);
    }
    return pts;
  };

  // Reference law.
  std::optional<EnsembleSnapshot> pooled;
  if (model.is_levy()) {
    rep.reference = "uniform";
  } else {
    rep.reference = "pooled";
    std::vector<const double*> all;
    for (std::size_t s = 0; s < n_starts; ++s) {
      auto pts = points_for(s, rungs - 1, 0, per);
      all.insert(all.end(), pts.begin(), pts.end());
    }
    pooled = snapshot(all, dim, period, opts.bins_per_axis, freqs);
  }
  const std::vector<Complex> zero_phi(freqs.size());

  for (std::size_t r = 0; r < rungs; ++r) {
    double tv_b = 0.0, tv_f = 0.0, tv = 0.0, noise = 0.0;
    for (std::size_t s = 0; s < n_starts; ++s) {
      const auto full = snapshot(points_for(s, r, 0, per), dim, period, opts.bins_per_axis, freqs);
      const double b = pooled ? full.hist.tv(pooled->hist) : full.hist.tv_to_uniform();
      const double f = fourier_distance(full.phi, pooled ? pooled->phi : zero_phi);
      tv_b = std::max(tv_b, b);
      tv_f = std::max(tv_f, f);
      tv = std::max(tv, std::max(b, f));
      const auto h1 = snapshot(points_for(s, r, 0, per / 2), dim, period, opts.bins_per_axis, freqs);
      const auto h2 =
          snapshot(points_for(s, r, per / 2, per), dim, period, opts.bins_per_axis, freqs);
      noise = std::max(noise, std::max(h1.hist.tv(h2.hist), fourier_distance(h1.phi, h2.phi)));
    }
    rep.tv.push_back(tv);
    rep.tv_binned.push_back(tv_b);
    rep.tv_fourier.push_back(tv_f);
    rep.noise_floor.push_back(noise);
  }

  // Least-squares fit of log TV against t over rungs clear of the noise.
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t r = 0; r < rungs; ++r) {
    if (times[r] <= 0.0 || !(rep.tv[r] > 2.0 * rep.noise_floor[r]) || rep.tv[r] <= 0.0) continue;
    const double y = std::log(rep.tv[r]);
    sx += times[r];
    sy += y;
    sxx += times[r] * times[r];
    sxy += times[r] * y;
    ++m;
  }
  rep.fitted_points = m;
  if (m >= 2) {
    const double den = m * sxx - sx * sx;
    if (den > 0.0) {
      const double slope = (m * sxy - sx * sy) / den;
      rep.lambda = -slope;
      rep.big_lambda = std::exp((sy - slope * sx) / m);
    }
  } else {
    rep.warnings.push_back("too few rungs above the noise floor for a decay fit");
  }
  rep.non_decaying = rep.tv.back() > std::max(0.1, 3.0 * rep.noise_floor.back());
  return rep;
}

}  // namespace tracer
