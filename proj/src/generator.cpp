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

#include "tracer/generator.hpp"

#include <cmath>
#include <limits>

#include "tracer/error.hpp"

namespace tracer {

namespace {

/// Jump part of the frozen stable symbol applied spectrally at x:
/// -sum_k gamma |xi_k|^alpha what(k) e^{i xi_k x}.
double stable_spectral_at(const PeriodicFunction& w, const Vec& x, double alpha,
                          double gamma) {
  Complex acc(0.0, 0.0);
  for (const auto& t : w.terms()) {
    const Vec xi = w.frequency(t);
    const double r = xi.norm();
    if (r == 0.0) continue;
    const double phase = xi.dot(x);
    acc -= gamma * std::pow(r, alpha) * t.coeff * Complex(std::cos(phase), std::sin(phase));
  }
  return acc.real();
}

/// int_eps^inf h(y) C y^{-1-alpha} dy for the one-dimensional stable
/// measure, with h bounded and h(y) = O(y^2) at 0. `tail_mean` is the
/// long-range average of h used for the far tail.
double stable_far_integral(const std::function<double(double)>& h, double alpha,
                           double scale, double eps, double period, int far_periods,
                           double tail_mean, Integrator& integ) {
  // [eps, 1] in log coordinates, where the integrand is smooth.
  const double near = integ.integrate_scalar(
      [&](double u) {
        const double y = std::exp(u);
        return h(y) * std::exp(-alpha * u);
      },
      std::log(eps), 0.0);
  const double upper = 1.0 + far_periods * period;
  std::vector<double> breaks;
  breaks.reserve(static_cast<std::size_t>(2 * far_periods));
  for (int i = 1; i < 2 * far_periods; ++i) breaks.push_back(1.0 + 0.5 * i * period);
  const double mid = integ.integrate_scalar(
      [&](double y) { return h(y) * std::pow(y, -1.0 - alpha); }, 1.0, upper, breaks);
  const double tail = tail_mean * std::pow(upper, -alpha) / alpha;
  return scale * (near + mid + tail);
}

void require_one_dimensional_stable(const DrivingModel& model) {
  if (model.dimension() != 1) {
    throw UnsupportedError("Taylor-split stable quadrature is one-dimensional");
  }
}

}  // namespace

double apply_pointwise(const DrivingModel& model, const PeriodicFunction& w, const Vec& x,
                       const GeneratorOptions& opts) {
  if (w.dimension() != model.dimension()) throw ModelError("function/model dimension mismatch");
  const Vec grad = gradient(w, x);
  double value = model.drift(x).dot(grad) + hessian_trace_form(w, x, model.diffusion(x));
  const double wx = w(x);

  const JumpMeasure& jumps = model.jumps();
  if (const auto* a = std::get_if<AtomicJumps>(&jumps)) {
    for (const auto& atom : a->atoms) {
      const double comp = atom.location.squaredNorm() <= 1.0 ? atom.location.dot(grad) : 0.0;
      value += atom.rate * (w(Vec(x + atom.location)) - wx - comp);
    }
  } else if (const auto* dj = std::get_if<DensityJumps>(&jumps)) {
    if (!jump_law_has_density(dj->law)) {
      throw UnsupportedError("generator of a sampler-only jump measure cannot be evaluated");
    }
    const double rate = dj->rate(x);
    if (rate > 0.0) {
      Integrator integ(opts.quadrature);
      Vec shifted(x.size());
      auto part = integrate_against_law(
          dj->law,
          [&](const Vec& y, std::span<double> out) {
            shifted = x + y;
            const double comp = y.squaredNorm() <= 1.0 ? y.dot(grad) : 0.0;
            out[0] = w(shifted) - wx - comp;
          },
          1, integ);
      value += rate * part[0];
    }
  } else if (const auto* st = std::get_if<StableJumps>(&jumps)) {
    const double alpha = st->alpha(x), gamma = st->gamma(x);
    if ((st->alpha.is_constant() && st->gamma.is_constant()) || model.dimension() > 1) {
      value += stable_spectral_at(w, x, alpha, gamma);
    } else {
      require_one_dimensional_stable(model);
      const double scale = gamma * stable_levy_constant(1, alpha);
      const double eps = opts.stable_epsilon;
      const double second = hessian(w, x)(0, 0);
      const double small = 0.5 * second * scale * 2.0 * std::pow(eps, 2.0 - alpha) / (2.0 - alpha);
      const double x0 = x(0);
      auto h = [&](double y) {
        const double p = x0 + y, m = x0 - y;
        return w.evaluate(std::span<const double>(&p, 1)) +
               w.evaluate(std::span<const double>(&m, 1)) - 2.0 * wx;
      };
      Integrator integ(opts.quadrature);
      value += small + stable_far_integral(h, alpha, scale, eps, w.period()(0),
                                           opts.stable_far_periods,
                                           2.0 * w.mean() - 2.0 * wx, integ);
    }
  }
  return value;
}

PeriodicFunction apply_fourier(const DrivingModel& model, const PeriodicFunction& w) {
  if (!model.is_levy()) {
    throw UnsupportedError("spectral generator requires constant (Levy) coefficients");
  }
  if (!model.period()) throw UnsupportedError("spectral generator requires a period");
  if (w.dimension() != model.dimension()) throw ModelError("function/model dimension mismatch");
  const Vec zero = Vec::Zero(model.dimension());
  std::vector<FourierTerm> terms;
  terms.reserve(w.terms().size());
  for (const auto& t : w.terms()) {
    const Complex q = eval_symbol(model, zero, dual_frequency(t.k, w.period())).q;
    terms.push_back({t.k, -q * t.coeff});
  }
  return PeriodicFunction(w.period(), std::move(terms), "A " + w.label());
}

VelocityField::VelocityField(const DrivingModel& model, std::vector<PeriodicFunction> w,
                             GeneratorOptions opts)
    : model_(&model), w_(std::move(w)), opts_(opts) {
  for (const auto& f : w_) {
    if (f.dimension() != model.dimension()) throw ModelError("function/model dimension mismatch");
    if ((f.period() - w_.front().period()).cwiseAbs().maxCoeff() > 0.0) {
      throw ModelError("all test functions must share one period");
    }
  }
  if (model.is_levy() && model.period()) {
    for (const auto& f : w_) {
      spectral_.push_back(apply_fourier(model, f));
      sup_bound_ = std::max(sup_bound_, spectral_.back().coefficient_l1());
    }
  } else {
    for (const auto& f : w_) {
      for (const Vec& x : model.probe_points(8)) {
        sup_bound_ = std::max(sup_bound_, std::abs(apply_pointwise(model, f, x, opts_)));
      }
    }
  }
}

void VelocityField::evaluate(std::span<const double> x, std::span<double> out) const {
  if (!spectral_.empty()) {
    for (std::size_t i = 0; i < spectral_.size(); ++i) out[i] = spectral_[i].evaluate(x);
    return;
  }
  const Vec xv = Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < w_.size(); ++i) out[i] = apply_pointwise(*model_, w_[i], xv, opts_);
}

Vec VelocityField::operator()(const Vec& x) const {
  Vec v(static_cast<Eigen::Index>(w_.size()));
  evaluate(std::span<const double>(x.data(), x.size()), std::span<double>(v.data(), v.size()));
  return v;
}

VelocityField velocity(const DrivingModel& model, std::vector<PeriodicFunction> w,
                       GeneratorOptions opts) {
  return VelocityField(model, std::move(w), opts);
}

double carre_du_champ(const DrivingModel& model, const PeriodicFunction& wi,
                      const PeriodicFunction& wj, const Vec& x, const GeneratorOptions& opts) {
  const Vec gi = gradient(wi, x), gj = gradient(wj, x);
  double value = gi.dot(model.diffusion(x) * gj);
  const double wix = wi(x), wjx = wj(x);

  const JumpMeasure& jumps = model.jumps();
  if (const auto* a = std::get_if<AtomicJumps>(&jumps)) {
    for (const auto& atom : a->atoms) {
      const Vec y = x + atom.location;
      value += atom.rate * (wi(y) - wix) * (wj(y) - wjx);
    }
  } else if (const auto* dj = std::get_if<DensityJumps>(&jumps)) {
    if (!jump_law_has_density(dj->law)) {
      throw UnsupportedError("carre du champ of a sampler-only jump measure cannot be evaluated");
    }
    const double rate = dj->rate(x);
    if (rate > 0.0) {
      Integrator integ(opts.quadrature);
      Vec shifted(x.size());
      auto part = integrate_against_law(
          dj->law,
          [&](const Vec& y, std::span<double> out) {
            shifted = x + y;
            out[0] = (wi(shifted) - wix) * (wj(shifted) - wjx);
          },
          1, integ);
      value += rate * part[0];
    }
  } else if (const auto* st = std::get_if<StableJumps>(&jumps)) {
    const double alpha = st->alpha(x), gamma = st->gamma(x);
    if (model.dimension() > 1) {
      // Frozen-symbol identity Gamma_J = A_J(fg) - f A_J g - g A_J f.
      const PeriodicFunction prod = wi.product(wj);
      value += stable_spectral_at(prod, x, alpha, gamma) -
               wix * stable_spectral_at(wj, x, alpha, gamma) -
               wjx * stable_spectral_at(wi, x, alpha, gamma);
    } else {
      const double scale = gamma * stable_levy_constant(1, alpha);
      const double eps = opts.stable_epsilon;
      const double small = gi(0) * gj(0) * scale * 2.0 * std::pow(eps, 2.0 - alpha) / (2.0 - alpha);
      const double x0 = x(0);
      auto h = [&](double y) {
        const double p = x0 + y, m = x0 - y;
        const std::span<const double> sp(&p, 1), sm(&m, 1);
        return (wi.evaluate(sp) - wix) * (wj.evaluate(sp) - wjx) +
               (wi.evaluate(sm) - wix) * (wj.evaluate(sm) - wjx);
      };
      // Mean of the product over a period: sum_k what_i(k) what_j(-k).
      double mean_prod = 0.0;
      for (const auto& t : wi.terms()) {
        LatticePoint neg(t.k.size());
        for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -t.k[j];
        mean_prod += (t.coeff * wj.coefficient(neg)).real();
      }
      const double tail_mean =
          2.0 * (mean_prod - wix * wj.mean() - wjx * wi.mean() + wix * wjx);
      Integrator integ(opts.quadrature);
      value += small + stable_far_integral(h, alpha, scale, eps, wi.period()(0),
                                           opts.stable_far_periods, tail_mean, integ);
    }
  }
  return value;
}

PeriodicFunction carre_du_champ_spectral(const DrivingModel& model, const PeriodicFunction& wi,
                                         const PeriodicFunction& wj) {
  const PeriodicFunction a_prod = apply_fourier(model, wi.product(wj));
  const PeriodicFunction a_i = apply_fourier(model, wi);
  const PeriodicFunction a_j = apply_fourier(model, wj);
  return a_prod + wi.product(a_j).scaled(-1.0) + wj.product(a_i).scaled(-1.0);
}

}  // namespace tracer
