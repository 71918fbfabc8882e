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

#include "tracer/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tracer/error.hpp"

namespace tracer {

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
using Gauss = boost::math::quadrature::gauss<double, 7>;

struct Panel {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> value;
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

class PanelRule {
 public:
  PanelRule(const Integrand1d& f, std::size_t m, std::size_t& counter,
            std::size_t budget)
      : f_(f), m_(m), counter_(counter), budget_(budget), buf_(m) {}

  Panel apply(double a, double b) {
    if (counter_ + 15 > budget_) {
      throw NumericalError("quadrature evaluation budget exhausted");
    }
    const auto& xk = Kronrod::abscissa();
    const auto& wk = Kronrod::weights();
    const auto& wg = Gauss::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::vector<double> kr(m_, 0.0), ga(m_, 0.0);

    f_(c, buf_);
    for (std::size_t j = 0; j < m_; ++j) {
      kr[j] = wk[0] * buf_[j];
      ga[j] = wg[0] * buf_[j];
    }
    for (std::size_t i = 1; i < xk.size(); ++i) {
      for (int sgn : {-1, 1}) {
        f_(c + sgn * h * xk[i], buf_);
        for (std::size_t j = 0; j < m_; ++j) {
          kr[j] += wk[i] * buf_[j];
          // Gauss nodes are the even-indexed Kronrod nodes.
          if (i % 2 == 0) ga[j] += wg[i / 2] * buf_[j];
        }
      }
    }
    counter_ += 15;
    Panel p{a, b, std::vector<double>(m_), 0.0};
    for (std::size_t j = 0; j < m_; ++j) {
      p.value[j] = h * kr[j];
      p.error = std::max(p.error, std::abs(h * (kr[j] - ga[j])));
    }
    return p;
  }

 private:
  const Integrand1d& f_;
  std::size_t m_;
  std::size_t& counter_;
  std::size_t budget_;
  std::vector<double> buf_;
};

}  // namespace

std::vector<double> Integrator::integrate(const Integrand1d& f,
                                          std::size_t components, double a,
                                          double b,
                                          std::span<const double> breaks) {
  std::vector<double> total(components, 0.0);
  if (a == b) return total;
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);

  std::vector<double> cuts{lo};
  for (double x : breaks) {
    if (x > lo && x < hi) cuts.push_back(x);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  PanelRule rule(f, components, evaluations_, opts_.max_evaluations);
  std::priority_queue<Panel> queue;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    queue.push(rule.apply(cuts[i], cuts[i + 1]));
  }

  double error = 0.0;
  auto add = [&](const Panel& p, double w) {
    for (std::size_t j = 0; j < components; ++j) total[j] += w * p.value[j];
    error += w * p.error;
  };
  {
    auto copy = queue;
    for (; !copy.empty(); copy.pop()) add(copy.top(), 1.0);
  }
  for (;;) {
    double magnitude = 0.0;
    for (double v : total) magnitude = std::max(magnitude, std::abs(v));
    const double target = std::max(opts_.abs_tol, opts_.rel_tol * magnitude);
    if (error <= target) break;
    Panel worst = queue.top();
    if (worst.b - worst.a <= 1e-13 * std::max(1.0, std::abs(worst.a))) {
      // Remaining error sits in panels too narrow to split further; accept
      // when it is negligible in absolute terms.
      if (error <= 1e3 * target) break;
      throw NumericalError("quadrature failed to converge (panel underflow)");
    }
    queue.pop();
    add(worst, -1.0);
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = rule.apply(worst.a, mid);
    Panel right = rule.apply(mid, worst.b);
    add(left, 1.0);
    add(right, 1.0);
    queue.push(std::move(left));
    queue.push(std::move(right));
  }
  for (double& v : total) v *= sign;
  return total;
}

double Integrator::integrate_scalar(const std::function<double(double)>& f,
                                    double a, double b,
                                    std::span<const double> breaks) {
  auto wrapped = [&f](double x, std::span<double> out) { out[0] = f(x); };
  return integrate(wrapped, 1, a, b, breaks)[0];
}

std::vector<double> Integrator::integrate_box(const IntegrandNd& f,
                                              std::size_t components,
                                              const Vec& lo, const Vec& hi) {
  std::vector<double> out(components, 0.0);
  Vec point = lo;
  nested(f, components, lo, hi, point, 0, 0.0, out);
  return out;
}

void Integrator::nested(const IntegrandNd& f, std::size_t components,
                        const Vec& lo, const Vec& hi, Vec& point,
                        Eigen::Index axis, double outer_radius2,
                        std::span<double> out) {
  std::vector<double> breaks;
  if (outer_radius2 < 1.0) {
    const double r = std::sqrt(1.0 - outer_radius2);
    breaks = {-r, r};
  }
  const bool last = axis + 1 == lo.size();
  auto slice = [&](double x, std::span<double> res) {
    point(axis) = x;
    if (last) {
      f(point, res);
    } else {
      nested(f, components, lo, hi, point, axis + 1,
             outer_radius2 + x * x, res);
    }
  };
  auto result = integrate(slice, components, lo(axis), hi(axis), breaks);
  std::copy(result.begin(), result.end(), out.begin());
}

}  // namespace tracer
