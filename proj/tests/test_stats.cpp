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
using testing::vec;

namespace {

// Kolmogorov survival by the Jacobi-theta dual series, accurate for small lambda.
double kolmogorov_dual(double lambda) {
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double k = 2.0 * j - 1.0;
    s += std::exp(-k * k * std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
  }
  return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * s;
}

TracerModel constant_tracer(const Mat& sigma, Vec mean_drift) {
  const auto d = sigma.rows();
  const auto k = PeriodicFunction::constant(testing::circle(), 0.0);
  DriftLaw drift;
  drift.mean = std::move(mean_drift);
  InitialLaw init;
  init.point = Vec::Zero(1);
  return TracerModel(testing::brownian(), std::vector<PeriodicFunction>(static_cast<std::size_t>(d), k),
                     sigma, drift, init, Vec::Zero(d));
}

}  // namespace

TEST_CASE("Kolmogorov distribution against the dual series") {
  for (double lambda = 0.25; lambda < 3.0; lambda += 0.05) {
    CAPTURE(lambda);
    CHECK(kolmogorov_survival(lambda) == doctest::Approx(kolmogorov_dual(lambda)).epsilon(1e-10).scale(1.0));
  }
  CHECK(kolmogorov_survival(0.0) == 1.0);
  CHECK(kolmogorov_survival(0.1) == 1.0);
  CHECK(kolmogorov_survival(10.0) < 1e-80);
  // classical critical values
  CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("KS calibration across seeds") {
  int accepted = 0;
  const int seeds = 200;
  std::vector<double> pvalues;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(1000 + static_cast<std::uint64_t>(s), 0);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = rng.normal();
    const auto r = ks_test(xs, [](double x) { return normal_cdf(x); });
    accepted += r.p_value > 0.01;
    pvalues.push_back(r.p_value);
  }
  CHECK(accepted >= 194);  // 99% nominal, binomial 3 sigma slack
  // p-values are close to uniform
  CHECK(ks_test(pvalues, [](double p) { return std::clamp(p, 0.0, 1.0); }).p_value > 0.001);
}

TEST_CASE("KS edge cases") {
  const std::vector<double> same(100, 0.3);
  CHECK(ks_test(same, [](double x) { return normal_cdf(x); }).p_value < 1e-20);
  CHECK_THROWS_AS(ks_test({1.0, 2.0}, [](double x) { return normal_cdf(x); }), ModelError);
  CHECK_THROWS_AS(ks_test(same, [](double) { return NAN; }), NumericalError);

  Rng rng(4, 0);
  std::vector<double> a(3000), b(3000), c(3000);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal();
  for (auto& x : c) x = rng.normal() + 0.2;
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  CHECK(ks_two_sample(a, a).p_value == 1.0);
  CHECK(ks_two_sample(a, b).p_value > 0.01);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  // exact statistic on a tiny case
  const auto t = ks_two_sample({1, 2, 3, 4, 5, 6, 7, 8}, {5, 6, 7, 8, 9, 10, 11, 12});
  CHECK(t.statistic == doctest::Approx(0.5));
}

TEST_CASE("moment estimators") {
  const auto c = empirical_covariance({vec({1.0, 0.0}), vec({-1.0, 0.0})});
  CHECK(c(0, 0) == doctest::Approx(2.0));
  CHECK(c(0, 1) == 0.0);
  CHECK(c(1, 1) == 0.0);
  CHECK_THROWS_AS(empirical_mean({vec({1.0})}), ModelError);
  CHECK_THROWS_AS(empirical_mean({vec({1.0}), vec({1.0, 2.0})}), ModelError);
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.0, 1.0, 4.0) == 0.5);
  CHECK(normal_cdf(2.0, 0.0, 4.0) == doctest::Approx(normal_cdf(1.0)));
  CHECK_THROWS_AS(normal_cdf(0.0, 0.0, 0.0), ModelError);

  // standard error of a Gaussian variance is sqrt(2/N) sigma^2
  Rng rng(6, 0);
  std::vector<Vec> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(vec({2.0 * rng.normal()}));
  const auto s = summarize(xs);
  CHECK(s.covariance_stderr(0, 0) == doctest::Approx(4.0 * std::sqrt(2.0 / 20000)).epsilon(0.05));
  CHECK(s.mean_stderr(0) == doctest::Approx(2.0 / std::sqrt(20000.0)).epsilon(0.02));
}

TEST_CASE("covariance estimators are affine equivariant") {
  Rng rng(13, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> xs, ys;
    Mat a(2, 2);
    a << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    const Vec shift = vec({rng.normal(), rng.normal()});
    for (int i = 0; i < 50; ++i) {
      xs.push_back(vec({rng.normal(), rng.exponential()}));
      ys.push_back(a * xs.back() + shift);
    }
    const Mat cx = empirical_covariance(xs);
    CHECK((empirical_covariance(ys) - a * cx * a.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((empirical_mean(ys) - (a * empirical_mean(xs) + shift)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(min_eigenvalue(cx) >= -1e-12);
  }
}

TEST_CASE("LLN identities") {
  // v = 0, Sigma = 0, D = (1, 2): X_{nt} / n = D t exactly
  const auto tm = constant_tracer(Mat::Zero(2, 2), vec({1.0, 2.0}));
  LlnOptions o;
  o.n_ladder = {10.0, 20.0, 40.0};
  o.n_paths = 8;
  const auto r = lln_experiment(tm, o);
  for (const auto& rung : r.rungs) CHECK(rung.mean_deviation < 1e-12);
  CHECK(r.centering == "mean");

  // pure drift driver: deviation bounded by (2 sup|w| + |x0|) / n
  DriftLaw drift;
  drift.mean = vec({0.0});
  InitialLaw init;
  init.kind = InitialLaw::Kind::kUniformTorus;
  const TracerModel pd(testing::pure_drift(1.0), {testing::sin1()}, Mat::Zero(1, 1), drift, init, vec({0.7}));
  o.n_ladder = {25.0, 50.0, 100.0};
  o.dt = 1e-3;
  o.n_paths = 10;
  const auto q = lln_experiment(pd, o);
  for (const auto& rung : q.rungs) CHECK(rung.max_deviation <= (2.0 + 0.7) / rung.n + 1e-9);

  o.n_ladder = {10.0, 5.0};
  CHECK_THROWS_AS(lln_experiment(pd, o), ModelError);
}

TEST_CASE("CLT for a pure Brownian tracer") {
  // v = 0, Sigma = I: S_n(1) is exactly N(0, I)
  const auto tm = constant_tracer(Mat::Identity(2, 2), Vec::Zero(2));
  CltOptions o;
  o.n = 50.0;
  o.n_paths = 2000;
  o.seed = 21;
  o.t_grid = {0.5, 1.0, 2.0};
  const auto r = clt_experiment(tm, Mat::Identity(2, 2), o);
  CHECK(r.pass);
  for (const auto& row : r.rows) {
    CHECK(row.within_3se);
    CHECK(row.min_ks_p > 0.01);
    CHECK(row.relative_error < 0.1);
  }
  CHECK(r.linearity_spread < 0.15);
  CHECK(r.jump_cap.jumps == 0);
  CHECK(r.jump_cap.max_rescaled_increment == 0.0);
}

TEST_CASE("CLT for a Brownian driver") {
  const auto tm = testing::tracer_for(testing::brownian(), {testing::sin1()});
  const auto c = covariance_series(tm.driving(), tm.functions(), tm.noise_covariance()).c;
  CHECK(c(0, 0) == doctest::Approx(0.5));
  CltOptions o;
  o.n = 200.0;
  o.n_paths = 400;
  o.seed = 2024;
  const auto r = clt_experiment(tm, c, o);
  CHECK(r.rows[0].relative_error < 0.1);
  CHECK(r.rows[0].min_ks_p > 0.01);
  // with a point-mass drift law both centerings coincide
  CHECK((r.rows[0].stats.covariance - r.rows[0].unconditional.covariance).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(clt_experiment(tm, Mat::Zero(2, 2), o), ModelError);
}

TEST_CASE("jump cap") {
  const auto tm = testing::tracer_for(testing::rm3(), {testing::sin1()});
  Rng rng(3, 0);
  const auto p = simulate_tracer(tm, 0.01, 200.0, rng);
  const auto r = jump_cap_check(p, tm, 2000.0);
  CHECK(r.cap == doctest::Approx(2.0 / std::sqrt(2000.0)));
  CHECK(r.pass);
  CHECK(r.jumps > 0);
  CHECK(r.max_rescaled_increment <= r.bound);
  const auto r4 = jump_cap_check(p, tm, 8000.0);
  CHECK(r4.cap == doctest::Approx(r.cap / 2));
  CHECK(r4.max_rescaled_increment == doctest::Approx(r.max_rescaled_increment / 2));

  const auto bm = testing::tracer_for(testing::brownian(), {testing::sin1()});
  const auto q = simulate_tracer(bm, 0.01, 10.0, rng);
  CHECK(jump_cap_check(q, bm, 100.0).jumps == 0);

  JumpCapResult a{0.1, 0.2, 0.3, 2, true}, b{0.4, 0.2, 0.3, 5, false};
  const auto m = merge(a, b);
  CHECK(m.max_rescaled_increment == 0.4);
  CHECK(m.jumps == 7);
  CHECK_FALSE(m.pass);
}

TEST_CASE("Dynkin martingale") {
  const auto tm = testing::tracer_for(testing::rm3(), {testing::sin1(), testing::mixed()});
  const auto r = dynkin_check(tm, 1.0, 4000, 0.01, 8);
  CHECK(r.max_abs_z < 4.0);
  const auto drift = testing::tracer_for(testing::pure_drift(1.0), {testing::sin1()});
  const auto d = dynkin_check(drift, 1.0, 100, 1e-3, 1);
  CHECK(std::abs(d.mean[0]) < 1e-6);
  // deterministic flow: the Richardson term carries the trapezoid error
  CHECK(std::abs(d.mean[0]) / d.discretization[0] == doctest::Approx(1.0).epsilon(0.02));
  CHECK(d.max_abs_z < 4.0);
  const auto bm = testing::tracer_for(testing::brownian(3.0), {testing::sin1()});
  CHECK(dynkin_check(bm, 1.0, 2000, 0.01, 2).max_abs_z < 4.0);
}

TEST_CASE("tracer noise adds Sigma to the covariance") {
  const auto bare = testing::tracer_for(testing::brownian(), {testing::sin1()}, 0.0);
  const auto noisy = testing::tracer_for(testing::brownian(), {testing::sin1()}, 1.0);
  CltOptions o;
  o.n = 100.0;
  o.n_paths = 2000;
  o.seed = 5;
  const auto a = clt_experiment(bare, Mat::Constant(1, 1, 0.5), o);
  const auto b = clt_experiment(noisy, Mat::Constant(1, 1, 1.5), o);
  const double shift = b.rows[0].stats.covariance(0, 0) - a.rows[0].stats.covariance(0, 0);
  const double se = std::hypot(a.rows[0].stats.covariance_stderr(0, 0), b.rows[0].stats.covariance_stderr(0, 0));
  CHECK(std::abs(shift - 1.0) < 3.0 * se);
  CHECK(b.rows[0].within_3se);
}
