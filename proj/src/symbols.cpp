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

#include "tracer/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tracer/error.hpp"

namespace tracer {

using std::numbers::pi;

namespace {

constexpr double kGaussianBoxHalfWidth = 9.0;  // in standard deviations

double gaussian_component_density(const GaussianComponent& c, const Vec& y) {
  double log_p = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    const double z = (y(j) - c.mean(j)) / c.stddev(j);
    log_p += -0.5 * z * z - std::log(c.stddev(j) * std::sqrt(2.0 * pi));
  }
  return std::exp(log_p);
}

bool all_constant(const std::vector<ScalarField>& fields) {
  return std::all_of(fields.begin(), fields.end(),
                     [](const ScalarField& f) { return f.is_constant(); });
}

double sphere_area(int d) {
  // Surface area of the unit sphere S^{d-1}; 2 for d = 1.
  return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

}  // namespace

// ---------------------------------------------------------------------------
// Jump laws
// ---------------------------------------------------------------------------

bool jump_law_has_density(const JumpLaw& law) {
  return !std::holds_alternative<SamplerLaw>(law);
}

double jump_law_density(const JumpLaw& law, const Vec& y) {
  if (const auto* g = std::get_if<GaussianMixtureLaw>(&law)) {
    double p = 0.0;
    for (const auto& c : g->components) p += c.weight * gaussian_component_density(c, y);
    return p;
  }
  if (const auto* u = std::get_if<UniformBoxLaw>(&law)) {
    for (Eigen::Index j = 0; j < y.size(); ++j) {
      if (y(j) < u->lo(j) || y(j) > u->hi(j)) return 0.0;
    }
    return 1.0 / (u->hi - u->lo).prod();
  }
  throw UnsupportedError("jump law is sampler-only; no density available");
}

void sample_jump_law(const JumpLaw& law, Rng& rng, std::span<double> out) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    if (const auto* g = std::get_if<GaussianMixtureLaw>(&law)) {
      const double u = rng.uniform();
      double acc = 0.0;
      const GaussianComponent* pick = &g->components.back();
      for (const auto& c : g->components) {
        acc += c.weight;
        if (u < acc) {
          pick = &c;
          break;
        }
      }
      for (std::size_t j = 0; j < out.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out[j] = pick->mean(jj) + pick->stddev(jj) * rng.normal();
      }
    } else if (const auto* b = std::get_if<UniformBoxLaw>(&law)) {
      for (std::size_t j = 0; j < out.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        out[j] = b->lo(jj) + (b->hi(jj) - b->lo(jj)) * rng.uniform();
      }
    } else {
      std::get<SamplerLaw>(law).sample(rng, out);
    }
    if (std::any_of(out.begin(), out.end(), [](double v) { return v != 0.0; })) {
      return;
    }
  }
  throw NumericalError("jump sampler keeps returning the zero vector");
}

double stable_levy_constant(int d, double alpha) {
  return alpha * std::pow(2.0, alpha - 1.0) * std::tgamma(0.5 * (d + alpha)) /
         (std::pow(pi, 0.5 * d) * std::tgamma(1.0 - 0.5 * alpha));
}

std::vector<double> integrate_against_law(
    const JumpLaw& law,
    const std::function<void(const Vec&, std::span<double>)>& g,
    std::size_t components, Integrator& integrator) {
  std::vector<double> total(components, 0.0);
  if (const auto* mix = std::get_if<GaussianMixtureLaw>(&law)) {
    for (const auto& c : mix->components) {
      const Vec lo = c.mean - kGaussianBoxHalfWidth * c.stddev;
      const Vec hi = c.mean + kGaussianBoxHalfWidth * c.stddev;
      auto f = [&](const Vec& y, std::span<double> out) {
        g(y, out);
        const double p = gaussian_component_density(c, y);
        for (double& v : out) v *= p;
      };
      auto part = integrator.integrate_box(f, components, lo, hi);
      for (std::size_t j = 0; j < components; ++j) total[j] += c.weight * part[j];
    }
    return total;
  }
  if (const auto* box = std::get_if<UniformBoxLaw>(&law)) {
    const double inv_vol = 1.0 / (box->hi - box->lo).prod();
    auto part = integrator.integrate_box(g, components, box->lo, box->hi);
    for (std::size_t j = 0; j < components; ++j) total[j] = inv_vol * part[j];
    return total;
  }
  throw UnsupportedError("jump law is sampler-only; cannot integrate against it");
}

// ---------------------------------------------------------------------------
// DrivingModel
// ---------------------------------------------------------------------------

DrivingModel::DrivingModel(Spec spec, const QuadratureOptions& quad)
    : spec_(std::move(spec)), quad_(quad) {
  validate();
}

std::vector<Vec> DrivingModel::probe_points(int per_axis) const {
  const int d = spec_.dimension;
  if (levy_) return {Vec::Zero(d)};
  const int n = std::max(1, per_axis);
  Vec lo = Vec::Constant(d, -5.0), hi = Vec::Constant(d, 5.0);
  if (spec_.period) {
    lo = Vec::Zero(d);
    hi = *spec_.period;
  }
  std::vector<Vec> pts;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  for (;;) {
    Vec x(d);
    for (int j = 0; j < d; ++j) {
      // Offset away from the grid to avoid aligning with coefficient nodes.
      x(j) = lo(j) + (hi(j) - lo(j)) * (idx[static_cast<std::size_t>(j)] + 0.37) / n;
    }
    pts.push_back(std::move(x));
    int j = d - 1;
    for (; j >= 0; --j) {
      if (++idx[static_cast<std::size_t>(j)] < n) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
    if (j < 0) break;
  }
  return pts;
}

void DrivingModel::validate() {
  const int d = spec_.dimension;
  if (d < 1) throw ModelError("dimension must be >= 1");
  if (static_cast<int>(spec_.drift.size()) != d) {
    throw ModelError("drift must have `dimension` components");
  }
  if (static_cast<int>(spec_.diffusion.size()) != d * d) {
    throw ModelError("diffusion must be a dimension x dimension matrix");
  }
  if (spec_.period) {
    if (spec_.period->size() != d) throw ModelError("period dimension mismatch");
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!((*spec_.period)(j) > 0.0) || !std::isfinite((*spec_.period)(j))) {
        throw ModelError("period entries must be finite and > 0");
      }
    }
  }

  bool jumps_constant = true;
  symmetric_ = true;
  law_small_mean_ = Vec::Zero(d);
  std::visit(
      [&](auto& j) {
        using T = std::decay_t<decltype(j)>;
        if constexpr (std::is_same_v<T, AtomicJumps>) {
          for (const auto& a : j.atoms) {
            if (a.location.size() != d) throw ModelError("atom dimension mismatch");
            if (!(a.rate > 0.0) || !std::isfinite(a.rate)) {
              throw ModelError("atom rates must be finite and > 0");
            }
            if (!a.location.allFinite() || a.location.isZero(0.0)) {
              throw ModelError("atoms must be finite and away from the origin");
            }
          }
          for (const auto& a : j.atoms) {
            const bool mirrored = std::any_of(
                j.atoms.begin(), j.atoms.end(), [&](const Atom& b) {
                  return (b.location + a.location).cwiseAbs().maxCoeff() < 1e-14 &&
                         std::abs(b.rate - a.rate) < 1e-14;
                });
            symmetric_ = symmetric_ && mirrored;
          }
        } else if constexpr (std::is_same_v<T, DensityJumps>) {
          jumps_constant = j.rate.is_constant();
          if (auto* mix = std::get_if<GaussianMixtureLaw>(&j.law)) {
            if (mix->components.empty()) throw ModelError("empty Gaussian mixture");
            double total = 0.0;
            for (const auto& c : mix->components) {
              if (c.mean.size() != d || c.stddev.size() != d) {
                throw ModelError("Gaussian component dimension mismatch");
              }
              if (!(c.weight > 0.0) || !(c.stddev.minCoeff() > 0.0)) {
                throw ModelError("mixture weights and stddevs must be > 0");
              }
              total += c.weight;
            }
            for (auto& c : mix->components) c.weight /= total;
            for (const auto& a : mix->components) {
              const bool mirrored = std::any_of(
                  mix->components.begin(), mix->components.end(),
                  [&](const GaussianComponent& b) {
                    return (b.mean + a.mean).cwiseAbs().maxCoeff() < 1e-14 &&
                           (b.stddev - a.stddev).cwiseAbs().maxCoeff() < 1e-14 &&
                           std::abs(b.weight - a.weight) < 1e-14;
                  });
              symmetric_ = symmetric_ && mirrored;
            }
          } else if (auto* box = std::get_if<UniformBoxLaw>(&j.law)) {
            if (box->lo.size() != d || box->hi.size() != d ||
                !((box->hi - box->lo).minCoeff() > 0.0)) {
              throw ModelError("uniform jump box must satisfy lo < hi");
            }
            symmetric_ = symmetric_ && (box->lo + box->hi).cwiseAbs().maxCoeff() < 1e-14;
          } else {
            const auto& s = std::get<SamplerLaw>(j.law);
            if (!s.sample) throw ModelError("sampler law without a sampler");
            symmetric_ = symmetric_ && s.symmetric;
            if (!s.symmetric) {
              throw ModelError(
                  "sampler-only jump laws must be symmetric (the compensator "
                  "mean cannot be computed without a density)");
            }
          }
          if (jump_law_has_density(j.law)) {
            Integrator integ(quad_);
            auto moments = integrate_against_law(
                j.law,
                [d](const Vec& y, std::span<double> out) {
                  const double r2 = y.squaredNorm();
                  for (int i = 0; i < d; ++i) {
                    out[static_cast<std::size_t>(i)] = r2 <= 1.0 ? y(i) : 0.0;
                  }
                  out[static_cast<std::size_t>(d)] = std::min(1.0, r2);
                },
                static_cast<std::size_t>(d + 1), integ);
            for (int i = 0; i < d; ++i) law_small_mean_(i) = moments[static_cast<std::size_t>(i)];
            law_truncated_second_ = moments[static_cast<std::size_t>(d)];
          } else {
            law_truncated_second_ = 1.0;  // bound for any probability law
          }
        } else if constexpr (std::is_same_v<T, StableJumps>) {
          jumps_constant = j.alpha.is_constant() && j.gamma.is_constant();
        }
      },
      spec_.jumps);

  levy_ = all_constant(spec_.drift) && all_constant(spec_.diffusion) && jumps_constant;
  symmetric_ = symmetric_ && std::all_of(spec_.drift.begin(), spec_.drift.end(),
                                         [](const ScalarField& f) {
                                           auto v = f.constant_value();
                                           return v && *v == 0.0;
                                         });

  // Probe-grid invariants: PSD diffusion, periodicity, stable parameter
  // ranges, and coefficient bounds (boundedness of the coefficients).
  bounds_ = {};
  has_diffusion_ = false;
  double alpha_min = 2.0, alpha_max = 0.0;
  for (const Vec& x : probe_points(5)) {
    const Vec b = drift(x);
    const Mat c = diffusion(x);
    if (!b.allFinite() || !c.allFinite()) throw ModelError("non-finite coefficient");
    if (!tracer::is_symmetric(c, 1e-12)) throw ModelError("diffusion matrix must be symmetric");
    try {
      (void)symmetric_sqrt(c);
    } catch (const NumericalError&) {
      throw ModelError("diffusion matrix must be nonnegative definite");
    }
    if (c.cwiseAbs().maxCoeff() > 0.0) has_diffusion_ = true;
    bounds_.drift = std::max(bounds_.drift, b.norm());
    bounds_.diffusion = std::max(bounds_.diffusion, c.norm());

    double activity = 0.0, rate = 0.0;
    if (const auto* a = std::get_if<AtomicJumps>(&spec_.jumps)) {
      for (const auto& atom : a->atoms) {
        activity += atom.rate * std::min(1.0, atom.location.squaredNorm());
        rate += atom.rate;
      }
    } else if (const auto* dj = std::get_if<DensityJumps>(&spec_.jumps)) {
      rate = dj->rate(x);
      if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw ModelError("jump rate must be finite and >= 0");
      }
      activity = rate * law_truncated_second_;
    } else if (const auto* s = std::get_if<StableJumps>(&spec_.jumps)) {
      const double alpha = s->alpha(x), gamma = s->gamma(x);
      if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("stable index must lie in (0, 2)");
      if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ModelError("stable scale must be > 0");
      alpha_min = std::min(alpha_min, alpha);
      alpha_max = std::max(alpha_max, alpha);
      activity = gamma * stable_levy_constant(d, alpha) * sphere_area(d) *
                 (1.0 / (2.0 - alpha) + 1.0 / alpha);
      rate = std::numeric_limits<double>::infinity();
    }
    bounds_.jump_activity = std::max(bounds_.jump_activity, activity);
    bounds_.jump_rate = std::max(bounds_.jump_rate, rate);

    if (spec_.period) {
      for (int j = 0; j < d; ++j) {
        Vec xs = x;
        xs(j) += (*spec_.period)(j);
        const double scale = 1e-9 * (1.0 + b.norm() + c.norm());
        bool ok = (drift(xs) - b).norm() <= scale && (diffusion(xs) - c).norm() <= scale;
        if (const auto* dj = std::get_if<DensityJumps>(&spec_.jumps)) {
          ok = ok && std::abs(dj->rate(xs) - dj->rate(x)) <= 1e-9 * (1.0 + rate);
        } else if (const auto* s = std::get_if<StableJumps>(&spec_.jumps)) {
          ok = ok && std::abs(s->alpha(xs) - s->alpha(x)) <= 1e-9 &&
               std::abs(s->gamma(xs) - s->gamma(x)) <= 1e-9 * (1.0 + s->gamma(x));
        }
        if (!ok) throw ModelError("coefficients are not periodic with the declared period");
      }
    }
  }
  if (std::holds_alternative<StableJumps>(spec_.jumps) &&
      !(alpha_min > 0.0 && alpha_max < 2.0)) {
    throw ModelError("stable-like index must stay strictly inside (0, 2)");
  }

  if (levy_) {
    const Vec zero = Vec::Zero(d);
    levy_rate_ = jump_rate(zero);
    levy_effective_drift_ = drift(zero) - small_jump_mean(zero);
  }
}

Vec DrivingModel::drift(const Vec& x) const {
  Vec b(spec_.dimension);
  drift_into(std::span<const double>(x.data(), x.size()),
             std::span<double>(b.data(), b.size()));
  return b;
}

void DrivingModel::drift_into(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < spec_.drift.size(); ++i) out[i] = spec_.drift[i](x);
}

Mat DrivingModel::diffusion(const Vec& x) const {
  const int d = spec_.dimension;
  Mat c(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      c(i, j) = spec_.diffusion[static_cast<std::size_t>(i * d + j)](x);
    }
  }
  return c;
}

double DrivingModel::jump_rate(const Vec& x) const {
  if (levy_ && levy_effective_drift_.size() > 0) return levy_rate_;
  if (const auto* a = std::get_if<AtomicJumps>(&spec_.jumps)) {
    double r = 0.0;
    for (const auto& atom : a->atoms) r += atom.rate;
    return r;
  }
  if (const auto* dj = std::get_if<DensityJumps>(&spec_.jumps)) return dj->rate(x);
  if (std::holds_alternative<StableJumps>(spec_.jumps)) {
    return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

Vec DrivingModel::small_jump_mean(const Vec& x) const {
  Vec m = Vec::Zero(spec_.dimension);
  if (const auto* a = std::get_if<AtomicJumps>(&spec_.jumps)) {
    for (const auto& atom : a->atoms) {
      if (atom.location.squaredNorm() <= 1.0) m += atom.rate * atom.location;
    }
  } else if (const auto* dj = std::get_if<DensityJumps>(&spec_.jumps)) {
    m = dj->rate(x) * law_small_mean_;
  }
  return m;
}

Vec DrivingModel::effective_drift(const Vec& x) const {
  if (levy_) return levy_effective_drift_;
  return drift(x) - small_jump_mean(x);
}

double DrivingModel::stable_alpha(const Vec& x) const {
  const auto* s = std::get_if<StableJumps>(&spec_.jumps);
  if (!s) throw UnsupportedError("model has no stable jump part");
  return s->alpha(x);
}

double DrivingModel::stable_gamma(const Vec& x) const {
  const auto* s = std::get_if<StableJumps>(&spec_.jumps);
  if (!s) throw UnsupportedError("model has no stable jump part");
  return s->gamma(x);
}

// ---------------------------------------------------------------------------
// Symbol
// ---------------------------------------------------------------------------

SymbolValue eval_symbol(const DrivingModel& model, const Vec& x, const Vec& xi) {
  if (xi.size() != model.dimension() || x.size() != model.dimension()) {
    throw ModelError("symbol argument dimension mismatch");
  }
  SymbolValue s;
  s.drift_imag = -xi.dot(model.drift(x));
  s.quadratic = 0.5 * xi.dot(model.diffusion(x) * xi);

  const JumpMeasure& jumps = model.jumps();
  if (const auto* a = std::get_if<AtomicJumps>(&jumps)) {
    for (const auto& atom : a->atoms) {
      const double theta = xi.dot(atom.location);
      const double comp = atom.location.squaredNorm() <= 1.0 ? theta : 0.0;
      s.jump_real += atom.rate * (1.0 - std::cos(theta));
      s.jump_imag -= atom.rate * (std::sin(theta) - comp);
    }
  } else if (const auto* dj = std::get_if<DensityJumps>(&jumps)) {
    if (!jump_law_has_density(dj->law)) {
      throw UnsupportedError("symbol of a sampler-only jump measure cannot be evaluated");
    }
    const double rate = dj->rate(x);
    if (rate > 0.0 && !xi.isZero(0.0)) {
      Integrator integ(model.quadrature());
      auto parts = integrate_against_law(
          dj->law,
          [&xi](const Vec& y, std::span<double> out) {
            const double theta = xi.dot(y);
            const double comp = y.squaredNorm() <= 1.0 ? theta : 0.0;
            out[0] = 1.0 - std::cos(theta);
            out[1] = -(std::sin(theta) - comp);
          },
          2, integ);
      s.jump_real = rate * parts[0];
      s.jump_imag = rate * parts[1];
    }
  } else if (const auto* st = std::get_if<StableJumps>(&jumps)) {
    const double r = xi.norm();
    s.jump_real = r == 0.0 ? 0.0 : st->gamma(x) * std::pow(r, st->alpha(x));
  }
  s.q = Complex(s.quadratic + s.jump_real, s.drift_imag + s.jump_imag);
  return s;
}

Complex lattice_symbol(const DrivingModel& model, const LatticePoint& k,
                       FrequencyConvention conv) {
  if (!model.is_levy()) throw UnsupportedError("lattice symbol requires a Levy model");
  if (!model.period()) throw UnsupportedError("lattice symbol requires a period");
  return eval_symbol(model, Vec::Zero(model.dimension()),
                     dual_frequency(k, *model.period(), conv))
      .q;
}

std::vector<LatticePoint> lattice_shells(int d, int k_max) {
  std::vector<LatticePoint> pts;
  LatticePoint k(static_cast<std::size_t>(d), -k_max);
  if (k_max < 1) return pts;
  for (;;) {
    if (std::any_of(k.begin(), k.end(), [](int v) { return v != 0; })) pts.push_back(k);
    int j = d - 1;
    for (; j >= 0; --j) {
      auto& v = k[static_cast<std::size_t>(j)];
      if (++v <= k_max) break;
      v = -k_max;
    }
    if (j < 0) break;
  }
  auto shell = [](const LatticePoint& p) {
    int r = 0;
    for (int v : p) r = std::max(r, std::abs(v));
    return r;
  };
  std::stable_sort(pts.begin(), pts.end(), [&](const LatticePoint& a, const LatticePoint& b) {
    const int ra = shell(a), rb = shell(b);
    if (ra != rb) return ra < rb;
    return a > b;
  });
  return pts;
}

ErgodicityCheck check_ergodicity_condition(const DrivingModel& model, int k_max,
                                           FrequencyConvention conv, double eps_zero) {
  if (!model.is_levy()) throw UnsupportedError("ergodicity condition requires a Levy model");
  if (!model.period()) throw UnsupportedError("ergodicity condition requires a period");
  ErgodicityCheck out;
  out.k_max = k_max;
  out.convention = conv;
  out.min_re_q = std::numeric_limits<double>::infinity();
  bool near_zero = false;
  for (const auto& k : lattice_shells(model.dimension(), k_max)) {
    const double re = lattice_symbol(model, k, conv).real();
    if (re < out.min_re_q) {
      out.min_re_q = re;
      out.argmin = k;
    }
    if (std::abs(re) <= eps_zero) {
      // Exact (to roundoff) zero: the condition fails here.
      if (std::abs(re) == 0.0 || std::abs(re) <= 1e-3 * eps_zero) {
        out.verdict = ErgodicityCheck::Verdict::kFail;
        out.k0 = k;
        return out;
      }
      near_zero = true;
      if (!out.k0) out.k0 = k;
    }
  }
  out.verdict = near_zero ? ErgodicityCheck::Verdict::kInconclusive
                          : ErgodicityCheck::Verdict::kPass;
  return out;
}

StrongErgodicityHint check_strong_ergodicity_hint(const DrivingModel& model, int k_max,
                                                  double ratio_tol,
                                                  FrequencyConvention conv) {
  if (!model.is_levy() || !model.period()) {
    throw UnsupportedError("strong ergodicity hint requires a periodic Levy model");
  }
  StrongErgodicityHint h;
  h.shell_min.assign(static_cast<std::size_t>(std::max(k_max, 0)),
                     std::numeric_limits<double>::infinity());
  h.outer_min = std::numeric_limits<double>::infinity();
  for (const auto& k : lattice_shells(model.dimension(), k_max)) {
    int r = 0;
    for (int v : k) r = std::max(r, std::abs(v));
    const double re = lattice_symbol(model, k, conv).real();
    auto& m = h.shell_min[static_cast<std::size_t>(r - 1)];
    m = std::min(m, re);
    if (2 * r > k_max && re < h.outer_min) {
      h.outer_min = re;
      h.outer_argmin = k;
    }
  }
  h.first_shell_min = h.shell_min.empty() ? 0.0 : h.shell_min.front();
  h.not_strongly_ergodic = k_max >= 2 && h.outer_min < ratio_tol * h.first_shell_min;
  return h;
}

SummabilityReport check_summability(const PeriodicFunction& w, const DrivingModel& model,
                                    int k_max, FrequencyConvention conv, double eps_zero) {
  if (!model.is_levy() || !model.period()) {
    throw UnsupportedError("summability check requires a periodic Levy model");
  }
  SummabilityReport rep;
  const int radius = std::min(k_max, std::max(w.support_radius(), 0));
  rep.shell_contribution.assign(static_cast<std::size_t>(std::max(radius, 0)), 0.0);
  for (const auto& term : w.terms()) {
    int r = 0;
    double k2 = 0.0;
    for (int v : term.k) {
      r = std::max(r, std::abs(v));
      k2 += static_cast<double>(v) * v;
    }
    if (r == 0 || r > k_max) continue;
    const double re = lattice_symbol(model, term.k, conv).real();
    if (std::abs(re) <= eps_zero) {
      rep.verdict = SummabilityReport::Verdict::kFail;
      rep.k0 = term.k;
      return rep;
    }
    rep.shell_contribution[static_cast<std::size_t>(r - 1)] +=
        k2 * std::abs(term.coeff) * (1.0 + 1.0 / (re * re));
  }
  double acc = 0.0;
  for (double s : rep.shell_contribution) {
    acc += s;
    rep.partial_sums.push_back(acc);
  }
  rep.total = acc;
  // Raabe's test on the last two shells, only when the tail is populated.
  const std::size_t n = rep.shell_contribution.size();
  if (n >= 3 && rep.shell_contribution[n - 1] > 0.0 && rep.shell_contribution[n - 2] > 0.0 &&
      rep.shell_contribution[n - 3] > 0.0) {
    const double raabe = static_cast<double>(n - 1) *
                         (rep.shell_contribution[n - 2] / rep.shell_contribution[n - 1] - 1.0);
    rep.raabe = raabe;
    if (raabe <= 1.0) rep.verdict = SummabilityReport::Verdict::kSlowDecay;
  }
  return rep;
}

SectorCheck check_sector_condition(const DrivingModel& model, const std::vector<Vec>& probe_x,
                                   const std::vector<Vec>& probe_xi, double eps_zero) {
  SectorCheck out;
  out.pass = true;
  for (const Vec& xi : probe_xi) {
    if (xi.isZero(0.0)) continue;
    double im_sup = 0.0, re_inf = std::numeric_limits<double>::infinity();
    for (const Vec& x : probe_x) {
      const Complex q = eval_symbol(model, x, xi).q;
      im_sup = std::max(im_sup, std::abs(q.imag()));
      re_inf = std::min(re_inf, q.real());
    }
    if (im_sup <= eps_zero) continue;
    if (re_inf <= eps_zero) {
      out.pass = false;
      out.c = std::numeric_limits<double>::infinity();
      out.worst_xi = xi;
      return out;
    }
    const double ratio = im_sup / re_inf;
    if (ratio > out.c) {
      out.c = ratio;
      out.worst_xi = xi;
    }
  }
  out.pass = out.c < 1.0;
  return out;
}

HeatKernelReport check_heat_kernel_integrability(const DrivingModel& model, double t,
                                                 double cutoff,
                                                 const std::vector<Vec>& probe_x,
                                                 int radial_points) {
  const int d = model.dimension();
  if (!(t > 0.0) || !(cutoff > 0.0) || radial_points < 3) {
    throw ModelError("heat kernel check needs t > 0, cutoff > 0 and >= 3 radial points");
  }
  std::vector<Vec> dirs;
  if (d == 1) {
    dirs = {Vec::Constant(1, 1.0), Vec::Constant(1, -1.0)};
  } else if (d == 2) {
    for (int i = 0; i < 16; ++i) {
      const double a = 2.0 * pi * i / 16.0;
      dirs.push_back((Vec(2) << std::cos(a), std::sin(a)).finished());
    }
  } else {
    // Axis and diagonal directions.
    for (int j = 0; j < d; ++j) {
      for (double s : {-1.0, 1.0}) {
        Vec e = Vec::Zero(d);
        e(j) = s;
        dirs.push_back(e);
      }
    }
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec e(d);
      for (int j = 0; j < d; ++j) e(j) = (mask >> j) & 1 ? 1.0 : -1.0;
      dirs.push_back(e / std::sqrt(static_cast<double>(d)));
    }
  }

  HeatKernelReport rep;
  const int m = radial_points;
  rep.radii.resize(static_cast<std::size_t>(m));
  rep.integrand.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double r = cutoff * i / (m - 1);
    double g = 0.0;
    for (const Vec& e : dirs) {
      double re_inf = std::numeric_limits<double>::infinity();
      for (const Vec& x : probe_x) re_inf = std::min(re_inf, eval_symbol(model, x, r * e).q.real());
      g += std::exp(-t * re_inf);
    }
    rep.radii[static_cast<std::size_t>(i)] = r;
    rep.integrand[static_cast<std::size_t>(i)] = g / static_cast<double>(dirs.size());
  }
  const double area = sphere_area(d);
  const double h = cutoff / (m - 1);
  double total = 0.0, tail = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    const auto a = static_cast<std::size_t>(i), b = a + 1;
    const double fa = std::pow(rep.radii[a], d - 1) * rep.integrand[a];
    const double fb = std::pow(rep.radii[b], d - 1) * rep.integrand[b];
    const double piece = 0.5 * h * (fa + fb) * area;
    total += piece;
    if (rep.radii[a] >= 0.5 * cutoff) tail += piece;
  }
  rep.integral = total;
  rep.tail_fraction = total > 0.0 ? tail / total : 0.0;
  rep.tail_value = rep.integrand.back();
  rep.tail_floor = rep.integrand.back();
  for (int i = m / 2; i < m; ++i) {
    rep.tail_floor = std::min(rep.tail_floor, rep.integrand[static_cast<std::size_t>(i)]);
  }
  const double g_half = rep.integrand[static_cast<std::size_t>(m / 2)];
  const double r_half = rep.radii[static_cast<std::size_t>(m / 2)];
  if (g_half > 0.0 && rep.tail_value > 0.0) {
    rep.decay_rate = -std::log(rep.tail_value / g_half) / std::log(cutoff / r_half);
  } else {
    rep.decay_rate = std::numeric_limits<double>::infinity();
  }
  if (rep.tail_fraction > 0.25) {
    rep.verdict = HeatKernelReport::Verdict::kNonIntegrable;
  } else if (rep.tail_fraction < 1e-3) {
    rep.verdict = HeatKernelReport::Verdict::kIntegrable;
  }
  return rep;
}

bool check_conservative(const DrivingModel& model, const std::vector<Vec>& probe_x) {
  const Vec zero = Vec::Zero(model.dimension());
  return std::all_of(probe_x.begin(), probe_x.end(), [&](const Vec& x) {
    return std::abs(eval_symbol(model, x, zero).q) == 0.0;
  });
}

const char* to_string(ErgodicityCheck::Verdict v) {
  switch (v) {
    case ErgodicityCheck::Verdict::kPass: return "pass";
    case ErgodicityCheck::Verdict::kFail: return "fail";
    default: return "inconclusive";
  }
}

const char* to_string(SummabilityReport::Verdict v) {
  switch (v) {
    case SummabilityReport::Verdict::kPassFiniteSupport: return "pass (finite support)";
    case SummabilityReport::Verdict::kSlowDecay: return "slow decay";
    default: return "fail";
  }
}

const char* to_string(HeatKernelReport::Verdict v) {
  switch (v) {
    case HeatKernelReport::Verdict::kIntegrable: return "integrable";
    case HeatKernelReport::Verdict::kNonIntegrable: return "non-integrable";
    default: return "inconclusive";
  }
}

}  // namespace tracer
