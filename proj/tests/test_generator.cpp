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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tracer/error.hpp"
#include "tracer/generator.hpp"

using namespace tracer;
using testing::kTwoPi;
using testing::vec;

namespace {

const double kC = 2.0 * (1.0 - std::cos(1.0));

std::vector<Vec> probe_grid(int n = 100) {
  std::vector<Vec> xs;
  for (int i = 0; i < n; ++i) xs.push_back(vec({kTwoPi * (i + 0.37) / n}));
  return xs;
}

std::vector<PeriodicFunction> sample_functions() {
  const Vec tau = testing::circle();
  return {testing::sin1(), testing::cos1(), testing::mixed(),
          PeriodicFunction::sine(tau, 0, 3, 0.2) + PeriodicFunction::constant(tau, 1.0)};
}

}  // namespace

TEST_CASE("pointwise examples") {
  const double half_pi = std::numbers::pi / 2;
  CHECK(apply_pointwise(*testing::rm3(), testing::sin1(), vec({half_pi})) ==
        doctest::Approx(2.0 * (std::cos(1.0) - 1.0)).epsilon(1e-14));
  CHECK(apply_pointwise(*testing::brownian(), testing::sin1(), vec({half_pi})) ==
        doctest::Approx(-0.5).epsilon(1e-14));
  const auto k = PeriodicFunction::constant(testing::circle(), 4.0);
  CHECK(apply_pointwise(*testing::rm3(), k, vec({0.4})) == 0.0);
  CHECK(apply_pointwise(*testing::pure_drift(), k, vec({0.4})) == 0.0);
  CHECK(std::abs(apply_pointwise(*testing::gaussian_jumps(2.0, 0.5), k, vec({0.4}))) < 1e-12);
  CHECK(std::abs(apply_pointwise(*testing::feller(), k, vec({0.4}))) < 1e-12);
}

TEST_CASE("spectral examples") {
  const auto a = apply_fourier(*testing::rm3(), testing::sin1());
  CHECK(std::abs(a.coefficient({1}) - Complex(0, -0.5) * (-kC)) < 1e-15);
  CHECK(std::abs(a.coefficient({-1}) - Complex(0, 0.5) * (-kC)) < 1e-15);
  const Vec tau = testing::circle();
  const auto withmean = apply_fourier(*testing::rm3(), testing::sin1() + PeriodicFunction::constant(tau, 3.0));
  CHECK(std::abs(withmean.coefficient({0})) == 0.0);
  const auto b = apply_fourier(*testing::brownian(0.64), testing::sin1());
  for (double x : {0.2, 1.0, 4.0}) CHECK(b(vec({x})) == doctest::Approx(-0.32 * std::sin(x)));
  CHECK_THROWS_AS(apply_fourier(*testing::feller(), testing::sin1()), UnsupportedError);
}

TEST_CASE("spectral and pointwise agree for Levy models") {
  std::vector<std::shared_ptr<const DrivingModel>> models = {
      testing::rm3(), testing::brownian(0.8), testing::pure_drift(1.3), testing::stable(1.5, 1.0),
      testing::gaussian_jumps(1.5, 0.4, 0.3)};
  {
    auto s = testing::base_spec();
    s.jumps = AtomicJumps{{{vec({0.5}), 2.0}, {vec({-2.5}), 0.7}}};  // inside and outside the unit ball
    s.drift[0] = -0.2;
    s.diffusion[0] = 0.3;
    models.push_back(testing::make_model(std::move(s)));
  }
  const auto xs = probe_grid();
  for (const auto& m : models) {
    for (const auto& w : sample_functions()) {
      const auto spectral = apply_fourier(*m, w);
      double worst = 0.0;
      for (const Vec& x : xs) worst = std::max(worst, std::abs(spectral(x) - apply_pointwise(*m, w, x)));
      CAPTURE(m->name());
      CHECK(worst < 1e-8);
      // zero mean on the torus
      CHECK(std::abs(spectral.coefficient({0})) < 1e-15);
    }
  }
}

TEST_CASE("Taylor split for stable-like measures") {
  // Callable coefficients force the pointwise route even though they are constant.
  auto s = testing::base_spec();
  const double alpha = 1.5, gamma = 0.8;
  s.jumps = StableJumps{ScalarField(ScalarField::Callable([=](std::span<const double>) { return alpha; })),
                        ScalarField(ScalarField::Callable([=](std::span<const double>) { return gamma; }))};
  const DrivingModel callable(std::move(s));
  REQUIRE_FALSE(callable.is_levy());
  const auto exact = testing::stable(alpha, gamma);
  const auto w = PeriodicFunction::sine(testing::circle(), 0, 2) + testing::cos1();
  const auto spectral = apply_fourier(*exact, w);
  for (int i = 0; i < 12; ++i) {
    const Vec x = vec({kTwoPi * (i + 0.5) / 12});
    CHECK(apply_pointwise(callable, w, x) == doctest::Approx(spectral(x)).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("state-dependent stable generator is local in the index") {
  // A w(x) only sees nu(x, dy), so it equals the constant-index value at alpha(x), gamma(x).
  const Vec tau = testing::circle();
  auto s = testing::base_spec();
  const auto alpha = PeriodicFunction::constant(tau, 1.5) + PeriodicFunction::sine(tau, 0, 1, 0.2);
  const auto gamma = PeriodicFunction::constant(tau, 1.0) + PeriodicFunction::cosine(tau, 0, 1, 0.5);
  s.jumps = StableJumps{ScalarField(alpha), ScalarField(gamma)};
  const DrivingModel m(std::move(s));
  const auto w = PeriodicFunction::sine(tau, 0, 2);
  for (double x : {0.3, 1.7, 3.1, 5.0}) {
    const double a = alpha(vec({x})), g = gamma(vec({x}));
    CAPTURE(x);
    CHECK(apply_pointwise(m, w, vec({x})) ==
          doctest::Approx(-g * std::pow(2.0, a) * std::sin(2.0 * x)).epsilon(1e-6));
  }
}

TEST_CASE("atoms and narrow bumps give the same generator") {
  auto s = testing::base_spec();
  s.jumps = DensityJumps{2.0, GaussianMixtureLaw{{{0.5, vec({1.0}), vec({1e-3})},
                                                 {0.5, vec({-1.0}), vec({1e-3})}}}};
  const DrivingModel bumps(std::move(s));
  const auto atoms = testing::rm3();
  for (const Vec& x : probe_grid(20)) {
    CHECK(apply_pointwise(bumps, testing::mixed(), x) ==
          doctest::Approx(apply_pointwise(*atoms, testing::mixed(), x)).epsilon(1e-5).scale(1.0));
  }
}

TEST_CASE("velocity field") {
  const auto rm3 = testing::rm3();
  const VelocityField v(*rm3, {testing::sin1()});
  CHECK(v.spectral());
  for (double x : {0.0, 1.0, 2.0, 4.5}) {
    CHECK(v(vec({x}))(0) == doctest::Approx(2.0 * (std::cos(1.0) - 1.0) * std::sin(x)).scale(1.0));
  }
  CHECK(v.sup_bound() == doctest::Approx(kC));

  const auto k = PeriodicFunction::constant(testing::circle(), 2.0);
  const VelocityField zero(*rm3, {k, k});
  for (double x : {0.1, 2.2}) CHECK(zero(vec({x})).isZero(0.0));

  const double sigma2 = 0.49;
  const VelocityField b(*testing::brownian(sigma2), {testing::sin1(), testing::cos1()});
  for (double x : {0.3, 2.0}) {
    const Vec u = b(vec({x}));
    CHECK(u(0) == doctest::Approx(-sigma2 / 2 * std::sin(x)));
    CHECK(u(1) == doctest::Approx(-sigma2 / 2 * std::cos(x)));
  }

  const auto feller = testing::feller();
  const VelocityField f(*feller, {testing::sin1()});
  CHECK_FALSE(f.spectral());
  CHECK(f(vec({0.8}))(0) == doctest::Approx(apply_pointwise(*feller, testing::sin1(), vec({0.8}))));

  CHECK_THROWS_AS(VelocityField(*rm3, {testing::sin1(), PeriodicFunction::sine(vec({3.0}), 0)}),
                  ModelError);
}

TEST_CASE("carre du champ") {
  const auto rm3 = testing::rm3();
  const auto bm = testing::brownian();
  const auto s = testing::sin1();
  // torus averages by the grid rule
  double rm3_avg = 0.0, bm_avg = 0.0;
  const int n = 256;
  for (int i = 0; i < n; ++i) {
    const Vec x = vec({kTwoPi * i / n});
    rm3_avg += carre_du_champ(*rm3, s, s, x) / n;
    const double g = carre_du_champ(*bm, s, s, x);
    CHECK(g == doctest::Approx(std::cos(x(0)) * std::cos(x(0))).scale(1.0));
    bm_avg += g / n;
  }
  CHECK(rm3_avg == doctest::Approx(kC).epsilon(1e-13));
  CHECK(bm_avg == doctest::Approx(0.5).epsilon(1e-13));

  const auto k = PeriodicFunction::constant(testing::circle(), 1.0);
  CHECK(carre_du_champ(*rm3, k, s, vec({0.5})) == 0.0);

  std::vector<std::shared_ptr<const DrivingModel>> models = {
      rm3, bm, testing::stable(), testing::gaussian_jumps(1.0, 0.7), testing::feller()};
  const auto fs = sample_functions();
  for (const auto& m : models) {
    for (const Vec& x : probe_grid(10)) {
      for (const auto& a : fs) {
        CHECK(carre_du_champ(*m, a, a, x) >= -1e-12);
        for (const auto& b : fs) {
          CHECK(carre_du_champ(*m, a, b, x) ==
                doctest::Approx(carre_du_champ(*m, b, a, x)).epsilon(1e-9).scale(1.0));
        }
      }
    }
  }
}

TEST_CASE("spectral carre du champ matches the pointwise integrand") {
  const auto fs = sample_functions();
  for (const auto& m : {testing::rm3(), testing::brownian(0.6), testing::stable(1.5, 1.0),
                        testing::gaussian_jumps(1.2, 0.5)}) {
    for (const auto& a : fs) {
      for (const auto& b : fs) {
        const auto g = carre_du_champ_spectral(*m, a, b);
        for (const Vec& x : probe_grid(8)) {
          CHECK(g(x) == doctest::Approx(carre_du_champ(*m, a, b, x)).epsilon(1e-6).scale(1e-2));
        }
      }
    }
  }
}

TEST_CASE("dissipativity of symmetric Levy generators") {
  for (const auto& m : {testing::rm3(), testing::brownian(), testing::stable()}) {
    for (const auto& w : sample_functions()) {
      const auto aw = apply_fourier(*m, w);
      const auto prod = w.product(aw);
      CHECK(prod.mean() <= 1e-14);
      double expected = 0.0;
      for (const auto& t : w.terms()) {
        expected -= lattice_symbol(*m, t.k).real() * std::norm(t.coeff);
      }
      CHECK(prod.mean() == doctest::Approx(expected).epsilon(1e-12).scale(1.0));
    }
  }
}
