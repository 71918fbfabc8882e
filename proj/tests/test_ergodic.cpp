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
#include "tracer/ergodic.hpp"
#include "tracer/error.hpp"
#include "tracer/stats.hpp"

using namespace tracer;
using testing::kTwoPi;
using testing::vec;

namespace {

const double kC = 2.0 * (1.0 - std::cos(1.0));

PathSample path_of(const DrivingModel& m, double x0, double dt, double horizon, std::uint64_t seed) {
  Rng rng(seed, 0);
  return simulate_path(m, vec({x0}), dt, horizon, rng);
}

std::vector<std::vector<PeriodicFunction>> function_sets() {
  return {{testing::sin1()},
          {testing::cos1()},
          {testing::mixed()},
          {testing::sin1(), testing::cos1(), testing::mixed()}};
}

}  // namespace

TEST_CASE("Birkhoff averages") {
  const auto p = path_of(*testing::rm3(), 0.0, 0.01, 2000.0, 1);
  CHECK(birkhoff_average(p, [](std::span<const double>) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  const auto aw = apply_fourier(*testing::rm3(), testing::sin1());
  CHECK(std::abs(birkhoff_average(p, aw)) < 0.05);

  const auto drift = testing::pure_drift(1.0);
  const auto q = path_of(*drift, 0.4, 1e-3, 50.0, 2);
  const double expected = (std::sin(0.4 + 50.0) - std::sin(0.4)) / 50.0;
  const double got = birkhoff_average(q, apply_fourier(*drift, testing::sin1()));
  CHECK(got == doctest::Approx(expected).epsilon(1e-6).scale(1.0));
  CHECK(std::abs(got) <= 2.0 / 50.0);

  const auto z = path_of(*drift, 0.4, 0.1, 0.0, 3);
  CHECK(birkhoff_average(z, testing::sin1()) == doctest::Approx(std::sin(0.4)));
}

TEST_CASE("occupation histograms") {
  const auto bm = path_of(*testing::brownian(), 0.0, 0.01, 5000.0, 4);
  const auto h = occupation_histogram(bm, 32);
  CHECK(h.tv_to_uniform() < 0.05);
  CHECK(h.mass() == doctest::Approx(5000.0));
  double total = 0.0;
  for (double p : h.probabilities()) {
    CHECK(p >= 0.0);
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

  // irrational rotation equidistributes
  const auto rot = path_of(*testing::pure_drift(1.0), 0.0, 0.01, 5000.0, 5);
  CHECK(occupation_histogram(rot, 32).tv_to_uniform() < 0.05);
  // rational rotation with burn-in covers the circle too, but a stopped point does not
  const auto zero = path_of(*testing::zero_process(), 1.0, 0.01, 10.0, 6);
  const auto hz = occupation_histogram(zero, 32);
  const auto probs = hz.probabilities();
  const std::size_t cell = hz.cell_of(std::vector<double>{1.0});
  CHECK(probs[cell] == doctest::Approx(1.0));
  CHECK(hz.tv_to_uniform() == doctest::Approx(1.0 - 1.0 / 32.0));

  auto nonperiodic = testing::base_spec(1, std::nullopt);
  nonperiodic.diffusion[0] = 1.0;
  const DrivingModel np(std::move(nonperiodic));
  CHECK_THROWS_AS(occupation_histogram(path_of(np, 0.0, 0.01, 1.0, 7), 8), ModelError);
}

TEST_CASE("histogram bookkeeping") {
  OccupationHistogram a(vec({2.0, 1.0}), std::vector<int>{4, 2});
  CHECK(a.cells() == 8);
  CHECK_THROWS(a.probabilities());
  a.add(std::vector<double>{0.1, 0.9}, 2.0);
  a.add(std::vector<double>{1.9, 0.1});
  const Vec c = a.cell_center(a.cell_of(std::vector<double>{0.1, 0.9}));
  CHECK(c(0) == doctest::Approx(0.25));
  CHECK(c(1) == doctest::Approx(0.75));
  OccupationHistogram b(vec({2.0, 1.0}), std::vector<int>{4, 2});
  b.add(std::vector<double>{0.1, 0.9});
  a.merge(b);
  CHECK(a.mass() == doctest::Approx(4.0));
  CHECK(a.probabilities()[a.cell_of(std::vector<double>{0.1, 0.9})] == doctest::Approx(0.75));
  CHECK(a.tv(a) == 0.0);
  OccupationHistogram other(vec({2.0, 1.0}), 3);
  other.add(std::vector<double>{0.5, 0.5});
  CHECK_THROWS(a.merge(other));
  CHECK_THROWS(a.tv(other));
}

TEST_CASE("series covariance values") {
  const auto rm3 = testing::rm3();
  const auto r = covariance_series(*rm3, {testing::sin1()}, Mat::Zero(1, 1));
  CHECK(r.c(0, 0) == doctest::Approx(kC).epsilon(1e-14));
  CHECK(std::abs(r.c(0, 0) - 0.9193953882637205) < 1e-12);
  CHECK(r.method == "series");
  CHECK(r.valid);

  const auto b = covariance_series(*testing::brownian(), {testing::sin1()}, Mat::Zero(1, 1));
  CHECK(b.c_tilde(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

  const Mat sigma = Mat::Constant(1, 1, 0.25);
  const auto k = covariance_series(*rm3, {PeriodicFunction::constant(testing::circle(), 3.0)}, sigma);
  CHECK(k.c_tilde(0, 0) == 0.0);
  CHECK(k.c(0, 0) == 0.25);

  // stable: sin and cos(2x)/2 carry gamma |k|^alpha
  const auto s = covariance_series(*testing::stable(1.5, 1.0), {testing::mixed()}, Mat::Zero(1, 1));
  CHECK(s.c_tilde(0, 0) == doctest::Approx(1.0 + 0.25 * std::pow(2.0, 1.5)).epsilon(1e-14));

  // two components: sin and cos decouple
  const auto two = covariance_series(*rm3, {testing::sin1(), testing::cos1()}, Mat::Identity(2, 2));
  CHECK(two.c_tilde(0, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(two.c(1, 1) == doctest::Approx(1.0 + kC));
  CHECK((two.c - two.sigma - two.c_tilde).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("series and quadrature agree") {
  std::vector<std::shared_ptr<const DrivingModel>> models = {
      testing::rm3(), testing::brownian(), testing::stable(1.5, 1.0), testing::rm3(0.5),
      testing::gaussian_jumps(1.3, 0.6)};
  for (const auto& m : models) {
    for (const auto& w : function_sets()) {
      const Mat sigma = 0.1 * Mat::Identity(static_cast<Eigen::Index>(w.size()), static_cast<Eigen::Index>(w.size()));
      const auto s = covariance_series(*m, w, sigma);
      const auto q = covariance_quadrature(*m, w, sigma);
      CAPTURE(m->name());
      CHECK((s.c - q.c).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(q.invariant == "uniform");
      CHECK(s.min_eigenvalue >= -1e-10);
      CHECK(is_symmetric(s.c_tilde));
      CHECK(is_symmetric(q.c_tilde));
    }
  }
  // the pointwise Taylor split for stable laws also lands within 1e-6
  QuadratureCovarianceOptions pointwise;
  pointwise.spectral_stable = false;
  pointwise.grid_per_axis = 64;
  const auto st = testing::stable(1.5, 1.0);
  const auto a = covariance_series(*st, {testing::mixed()}, Mat::Zero(1, 1));
  const auto b = covariance_quadrature(*st, {testing::mixed()}, Mat::Zero(1, 1), pointwise);
  CHECK(std::abs(a.c(0, 0) - b.c(0, 0)) < 1e-6);
}

TEST_CASE("pairing identity") {
  for (const auto& m : {testing::rm3(), testing::brownian(), testing::stable(), testing::rm3(0.5)}) {
    for (const auto& w : function_sets()) {
      const auto s = covariance_series(*m, w, Mat::Zero(static_cast<Eigen::Index>(w.size()),
                                                        static_cast<Eigen::Index>(w.size())));
      const Mat p = generator_pairing(*m, w);
      CHECK((p + 0.5 * s.c_tilde).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  // rm3 by hand: (1/2pi) int sin(x) (2 cos 1 - 2) sin(x) dx = -C/2
  CHECK(generator_pairing(*testing::rm3(), {testing::sin1()})(0, 0) == doctest::Approx(-kC / 2).epsilon(1e-12));
}

TEST_CASE("zero covariance exactly when the velocity vanishes") {
  const Vec tau = testing::circle();
  const auto half_turn = testing::rm3(std::numbers::pi);  // q vanishes on even modes
  const auto s2 = PeriodicFunction::sine(tau, 0, 2);
  const auto r0 = covariance_series(*half_turn, {s2}, Mat::Zero(1, 1));
  CHECK(r0.c_tilde(0, 0) == doctest::Approx(0.0).scale(1.0));
  CHECK(apply_fourier(*half_turn, s2).coefficient_l1() < 1e-15);
  CHECK_FALSE(r0.valid);  // Re q = 0 on the support of w

  const auto r1 = covariance_series(*half_turn, {testing::sin1()}, Mat::Zero(1, 1));
  CHECK(r1.c_tilde(0, 0) == doctest::Approx(2.0 * 2.0 * 4.0 * 0.25));  // two modes k = +-1
  CHECK(apply_fourier(*half_turn, testing::sin1()).coefficient_l1() > 0.0);
  CHECK(r1.valid);

  const auto k = PeriodicFunction::constant(tau, 1.0);
  for (const auto& m : {testing::rm3(), testing::brownian(), testing::stable()}) {
    CHECK(covariance_series(*m, {k}, Mat::Zero(1, 1)).c_tilde(0, 0) == 0.0);
    CHECK(covariance_quadrature(*m, {k}, Mat::Zero(1, 1)).c_tilde.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(covariance_series(*m, {testing::sin1()}, Mat::Zero(1, 1)).c_tilde(0, 0) > 0.0);
  }
  CHECK_FALSE(covariance_series(*testing::pure_drift(), {testing::sin1()}, Mat::Zero(1, 1)).valid);
}

TEST_CASE("covariance input validation") {
  const auto rm3 = testing::rm3();
  CHECK_THROWS_AS(covariance_series(*rm3, {testing::sin1()}, Mat::Zero(2, 2)), ModelError);
  CHECK_THROWS_AS(covariance_series(*testing::feller(), {testing::sin1()}, Mat::Zero(1, 1)), UnsupportedError);
  OccupationHistogram wrong(vec({1.0}), 16);
  wrong.add(std::vector<double>{0.5});
  CHECK_THROWS_AS(covariance_quadrature(*rm3, {testing::sin1()}, Mat::Zero(1, 1), wrong), ModelError);
}

TEST_CASE("empirical invariant measures") {
  // A Levy pilot histogram reproduces the uniform answer up to binning and sampling.
  PilotOptions po;
  po.horizon = 2000.0;
  po.seed = 3;
  const auto rm3 = testing::rm3();
  const auto h = pilot_histogram(*rm3, po);
  const auto viaHist = covariance_quadrature(*rm3, {testing::sin1()}, Mat::Zero(1, 1), h);
  CHECK(viaHist.invariant == "empirical histogram");
  CHECK(viaHist.c(0, 0) == doctest::Approx(kC).epsilon(0.05));

  const auto pilot = covariance_pilot(*rm3, {testing::sin1()}, Mat::Zero(1, 1), po);
  CHECK(pilot.method == "monte-carlo");
  CHECK(pilot.c(0, 0) == doctest::Approx(kC).epsilon(0.05));

  // state-dependent model: histogram quadrature and pilot time average agree
  const auto f = testing::feller();
  const auto hf = pilot_histogram(*f, po);
  const auto qf = covariance_quadrature(*f, {testing::sin1(), testing::cos1()}, Mat::Zero(2, 2), hf);
  po.seed = 4;
  const auto pf = covariance_pilot(*f, {testing::sin1(), testing::cos1()}, Mat::Zero(2, 2), po);
  CHECK((qf.c - pf.c).cwiseAbs().maxCoeff() < 0.05 * qf.c.cwiseAbs().maxCoeff());
  CHECK(qf.min_eigenvalue > 0.0);
}

TEST_CASE("modified characteristics") {
  const auto rm3 = testing::rm3();
  const GammaField gamma(*rm3, {testing::sin1()});
  CHECK(gamma.spectral());
  const double n = 2000.0;
  EnsembleSpec spec{100, 55, 0, 0};
  const auto vals = run_ensemble(spec, [&](std::size_t, Rng& rng) {
    InitialLaw init;
    init.kind = InitialLaw::Kind::kUniformTorus;
    const Vec x0 = init.sample(rng, rm3->period());
    const auto p = simulate_path(*rm3, x0, 0.01, n, rng);
    const auto m = modified_characteristics(p, gamma, n, {0.0, 0.5, 1.0});
    REQUIRE(m[0](0, 0) == 0.0);
    return Vec(vec({m[1](0, 0), m[2](0, 0)}));
  });
  const auto s = summarize(vals);
  CHECK(std::abs(s.mean(1) - kC) < 0.1 * kC);
  CHECK(std::abs(s.mean(1) - kC) < 3.0 * s.mean_stderr(1));
  CHECK(std::abs(s.mean(0) - 0.5 * kC) < 3.0 * s.mean_stderr(0));

  const GammaField flat(*rm3, {PeriodicFunction::constant(testing::circle(), 1.0)});
  Rng rng(1, 0);
  const auto p = simulate_path(*rm3, vec({0.0}), 0.01, 10.0, rng);
  CHECK(modified_characteristics(p, flat, 5.0, {1.0, 2.0})[1](0, 0) == 0.0);
  CHECK_THROWS_AS(modified_characteristics(p, flat, 5.0, {3.0}), ModelError);

  // pointwise Gamma for state-dependent models matches the integrand
  const auto f = testing::feller();
  const GammaField gf(*f, {testing::sin1()});
  CHECK_FALSE(gf.spectral());
  CHECK(gf(vec({0.3}))(0, 0) == doctest::Approx(carre_du_champ(*f, testing::sin1(), testing::sin1(), vec({0.3}))));
}

TEST_CASE("TV decay diagnostic") {
  TvDecayOptions opts;
  opts.seed = 9;
  const auto b = tv_decay_estimate(*testing::brownian(), opts);
  CHECK_FALSE(b.non_decaying);
  CHECK(b.lambda > 0.0);
  CHECK(b.tv.back() < 0.1);
  CHECK(b.reference == "uniform");
  // at t = 0 the split halves coincide
  CHECK(b.noise_floor.front() == 0.0);
  // a point mass is far from uniform
  CHECK(b.tv.front() > 0.9);

  const auto r = tv_decay_estimate(*testing::rm3(), opts);
  CHECK(r.non_decaying);
  CHECK(r.tv.back() > 0.3);

  TvDecayOptions small = opts;
  small.paths_per_start = 200;
  small.times = {0.0, 0.5, 1.0};
  small.starts_per_axis = 2;
  const auto f = tv_decay_estimate(*testing::feller(), small);
  CHECK(f.reference == "pooled");
  CHECK_FALSE(f.warnings.empty());

  small.times = {1.0, 0.5};
  CHECK_THROWS_AS(tv_decay_estimate(*testing::brownian(), small), ModelError);
}
