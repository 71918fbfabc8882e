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

#include "tracer/torus.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "tracer/error.hpp"

namespace tracer {

using std::numbers::pi;

namespace {

void check_period(const Vec& period) {
  if (period.size() == 0) throw ModelError("period must have dimension >= 1");
  for (Eigen::Index j = 0; j < period.size(); ++j) {
    if (!(period(j) > 0.0) || !std::isfinite(period(j))) {
      throw ModelError("period entries must be finite and > 0");
    }
  }
}

LatticePoint negate(const LatticePoint& k) {
  LatticePoint m(k.size());
  std::transform(k.begin(), k.end(), m.begin(), [](int v) { return -v; });
  return m;
}

}  // namespace

TorusPoint project(const Vec& x, const Vec& period) {
  TorusPoint p{Vec(x.size())};
  project_into(std::span<const double>(x.data(), x.size()), period,
               std::span<double>(p.coords.data(), p.coords.size()));
  return p;
}

void project_into(std::span<const double> x, const Vec& period,
                  std::span<double> out) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double tau = period(static_cast<Eigen::Index>(j));
    double r = std::fmod(x[j], tau);
    if (r < 0.0) r += tau;
    if (r >= tau) r = 0.0;  // -tiny + tau rounds to tau
    out[j] = r;
  }
}

Vec dual_frequency(const LatticePoint& k, const Vec& period,
                   FrequencyConvention conv) {
  Vec xi(static_cast<Eigen::Index>(k.size()));
  const double volume = period.prod();
  for (std::size_t j = 0; j < k.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double denom =
        conv == FrequencyConvention::kPerAxis ? period(jj) : volume;
    xi(jj) = 2.0 * pi * k[j] / denom;
  }
  return xi;
}

PeriodicFunction::PeriodicFunction(Vec period, std::vector<FourierTerm> terms,
                                   std::string label)
    : period_(std::move(period)), terms_(std::move(terms)),
      label_(std::move(label)) {
  check_period(period_);
  normalize();
}

void PeriodicFunction::normalize() {
  const std::size_t d = static_cast<std::size_t>(period_.size());
  std::map<LatticePoint, Complex> merged;
  for (const auto& t : terms_) {
    if (t.k.size() != d) {
      throw ModelError("Fourier term dimension does not match the period");
    }
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
      throw ModelError("non-finite Fourier coefficient");
    }
    merged[t.k] += t.coeff;
  }
  terms_.clear();
  l1_ = 0.0;
  for (const auto& [k, c] : merged) {
    if (c == Complex(0.0, 0.0)) continue;
    terms_.push_back({k, c});
    l1_ += std::abs(c);
  }
  const double tol = 1e-12 * std::max(1.0, l1_);
  for (const auto& [k, c] : merged) {
    auto it = merged.find(negate(k));
    const Complex partner = it == merged.end() ? Complex(0.0) : it->second;
    if (std::abs(partner - std::conj(c)) > tol) {
      throw ModelError(
          "Fourier coefficients are not conjugate-symmetric; only real "
          "functions are supported");
    }
  }
}

PeriodicFunction PeriodicFunction::constant(const Vec& period, double value) {
  return PeriodicFunction(
      period, {{LatticePoint(static_cast<std::size_t>(period.size()), 0),
                Complex(value, 0.0)}},
      "const");
}

PeriodicFunction PeriodicFunction::sine(const Vec& period, int axis, int mode,
                                        double amplitude) {
  if (axis < 0 || axis >= period.size()) throw ModelError("axis out of range");
  LatticePoint k(static_cast<std::size_t>(period.size()), 0);
  k[static_cast<std::size_t>(axis)] = mode;
  // sin t = (e^{it} - e^{-it}) / 2i
  return PeriodicFunction(period,
                          {{k, Complex(0.0, -0.5 * amplitude)},
                           {negate(k), Complex(0.0, 0.5 * amplitude)}},
                          "sin");
}

PeriodicFunction PeriodicFunction::cosine(const Vec& period, int axis,
                                          int mode, double amplitude) {
  if (axis < 0 || axis >= period.size()) throw ModelError("axis out of range");
  LatticePoint k(static_cast<std::size_t>(period.size()), 0);
  k[static_cast<std::size_t>(axis)] = mode;
  return PeriodicFunction(
      period, {{k, Complex(0.5 * amplitude)}, {negate(k), Complex(0.5 * amplitude)}},
      "cos");
}

Complex PeriodicFunction::coefficient(const LatticePoint& k) const {
  for (const auto& t : terms_) {
    if (t.k == k) return t.coeff;
  }
  return {0.0, 0.0};
}

int PeriodicFunction::support_radius() const {
  int r = 0;
  for (const auto& t : terms_) {
    for (int v : t.k) r = std::max(r, std::abs(v));
  }
  return r;
}

double PeriodicFunction::smoothness_sum() const {
  double s = 0.0;
  for (const auto& t : terms_) {
    double k2 = 0.0;
    for (int v : t.k) k2 += static_cast<double>(v) * v;
    s += k2 * std::abs(t.coeff);
  }
  return s;
}

double PeriodicFunction::coefficient_l1() const { return l1_; }

double PeriodicFunction::evaluate(std::span<const double> x) const {
  Complex sum(0.0, 0.0);
  for (const auto& t : terms_) {
    double phase = 0.0;
    for (std::size_t j = 0; j < t.k.size(); ++j) {
      if (t.k[j] != 0) {
        phase += 2.0 * pi * t.k[j] * x[j] / period_(static_cast<Eigen::Index>(j));
      }
    }
    sum += t.coeff * Complex(std::cos(phase), std::sin(phase));
  }
  if (std::abs(sum.imag()) > 1e-12 * std::max(1.0, l1_)) {
    throw ModelError("imaginary residual in periodic function evaluation");
  }
  return sum.real();
}

double PeriodicFunction::operator()(const Vec& x) const {
  return evaluate(std::span<const double>(x.data(), x.size()));
}

PeriodicFunction PeriodicFunction::operator+(const PeriodicFunction& other) const {
  if (other.period_.size() != period_.size() ||
      (other.period_ - period_).cwiseAbs().maxCoeff() > 0.0) {
    throw ModelError("cannot add periodic functions with different periods");
  }
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return PeriodicFunction(period_, std::move(terms));
}

PeriodicFunction PeriodicFunction::scaled(double factor) const {
  auto terms = terms_;
  for (auto& t : terms) t.coeff *= factor;
  return PeriodicFunction(period_, std::move(terms), label_);
}

PeriodicFunction PeriodicFunction::product(const PeriodicFunction& other) const {
  if (other.period_.size() != period_.size() ||
      (other.period_ - period_).cwiseAbs().maxCoeff() > 0.0) {
    throw ModelError("cannot multiply periodic functions with different periods");
  }
  std::vector<FourierTerm> terms;
  terms.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      LatticePoint k(a.k.size());
      for (std::size_t j = 0; j < k.size(); ++j) k[j] = a.k[j] + b.k[j];
      terms.push_back({std::move(k), a.coeff * b.coeff});
    }
  }
  return PeriodicFunction(period_, std::move(terms));
}

double evaluate(const PeriodicFunction& w, const Vec& x) { return w(x); }

Vec gradient(const PeriodicFunction& w, const Vec& x) {
  const Eigen::Index d = w.period().size();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(d);
  for (const auto& t : w.terms()) {
    const Vec xi = w.frequency(t);
    const double phase = xi.dot(x);
    const Complex e = t.coeff * Complex(std::cos(phase), std::sin(phase));
    for (Eigen::Index p = 0; p < d; ++p) g(p) += Complex(0.0, xi(p)) * e;
  }
  return g.real();
}

Mat hessian(const PeriodicFunction& w, const Vec& x) {
  const Eigen::Index d = w.period().size();
  Mat h = Mat::Zero(d, d);
  for (const auto& t : w.terms()) {
    const Vec xi = w.frequency(t);
    const double phase = xi.dot(x);
    const double e =
        (t.coeff * Complex(std::cos(phase), std::sin(phase))).real();
    h -= e * xi * xi.transpose();
  }
  return h;
}

double hessian_trace_form(const PeriodicFunction& w, const Vec& x,
                          const Mat& c) {
  return 0.5 * (c.cwiseProduct(hessian(w, x))).sum();
}

PeriodicFunction fourier_coefficients(std::span<const double> samples,
                                      const std::vector<int>& grid,
                                      const Vec& period, int max_radius) {
  const std::size_t d = grid.size();
  if (static_cast<Eigen::Index>(d) != period.size()) {
    throw ModelError("grid dimension does not match the period");
  }
  if (max_radius < 0) throw ModelError("max radius must be >= 0");
  std::size_t total = 1;
  for (int n : grid) {
    if (n < 2 * max_radius + 2) {
      throw ModelError("grid too coarse for the requested Fourier radius");
    }
    total *= static_cast<std::size_t>(n);
  }
  if (samples.size() != total) {
    throw ModelError("sample count does not match the grid");
  }

  // Enumerate lattice points in the cube |k|_inf <= max_radius.
  std::vector<FourierTerm> terms;
  LatticePoint k(d, -max_radius);
  for (;;) {
    Complex acc(0.0, 0.0);
    std::vector<int> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
      double phase = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        phase -= 2.0 * pi * k[j] * idx[j] / grid[j];
      }
      acc += samples[n] * Complex(std::cos(phase), std::sin(phase));
      for (std::size_t j = d; j-- > 0;) {
        if (++idx[j] < grid[j]) break;
        idx[j] = 0;
      }
    }
    terms.push_back({k, acc / static_cast<double>(total)});
    std::size_t j = d;
    while (j-- > 0) {
      if (++k[j] <= max_radius) break;
      k[j] = -max_radius;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  // Symmetrize away roundoff so the result passes the real-valuedness check.
  std::map<LatticePoint, Complex> by_k;
  for (const auto& t : terms) by_k[t.k] = t.coeff;
  for (auto& t : terms) {
    t.coeff = 0.5 * (t.coeff + std::conj(by_k[negate(t.k)]));
  }
  return PeriodicFunction(period, std::move(terms), "sampled");
}

TorusGrid::TorusGrid(Vec period, std::vector<int> points_per_axis)
    : period_(std::move(period)), shape_(std::move(points_per_axis)), size_(1) {
  check_period(period_);
  if (static_cast<Eigen::Index>(shape_.size()) != period_.size()) {
    throw ModelError("grid dimension does not match the period");
  }
  for (int n : shape_) {
    if (n < 1) throw ModelError("grid needs at least one point per axis");
    size_ *= static_cast<std::size_t>(n);
  }
}

Vec TorusGrid::point(std::size_t index) const {
  const std::size_t d = shape_.size();
  Vec x(static_cast<Eigen::Index>(d));
  for (std::size_t j = d; j-- > 0;) {
    const auto n = static_cast<std::size_t>(shape_[j]);
    const auto jj = static_cast<Eigen::Index>(j);
    x(jj) = period_(jj) * static_cast<double>(index % n) / static_cast<double>(n);
    index /= n;
  }
  return x;
}

}  // namespace tracer
