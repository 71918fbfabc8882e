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

#include "tracer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tracer/error.hpp"

namespace tracer {

double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 0.2) return 1.0;  // the alternating series is 1 to double precision
  double sum = 0.0;
  for (int j = 1; j <= 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double stephens_p(double d, double n) {
  const double sn = std::sqrt(n);
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

void require_samples(std::size_t n, std::size_t minimum = 8) {
  if (n < minimum) {
    throw ModelError("statistics need at least " + std::to_string(minimum) + " samples");
  }
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require_samples(samples.size());
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    if (!std::isfinite(f)) throw NumericalError("cdf returned a non-finite value");
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, stephens_p(d, n), samples.size()};
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require_samples(a.size());
  require_samples(b.size());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, stephens_p(d, na * nb / (na + nb)), a.size() + b.size()};
}

double normal_cdf(double x, double mean, double variance) {
  if (!(variance > 0.0)) throw ModelError("normal cdf needs a positive variance");
  return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

Vec empirical_mean(const std::vector<Vec>& samples) {
  require_samples(samples.size(), 2);
  Vec m = Vec::Zero(samples.front().size());
  for (const auto& s : samples) {
    if (s.size() != m.size()) throw ModelError("samples have mixed dimensions");
    m += s;
  }
  return m / static_cast<double>(samples.size());
}

Mat empirical_covariance(const std::vector<Vec>& samples) {
  const Vec m = empirical_mean(samples);
  Mat c = Mat::Zero(m.size(), m.size());
  for (const auto& s : samples) {
    const Vec r = s - m;
    c += r * r.transpose();
  }
  c /= static_cast<double>(samples.size() - 1);
  return 0.5 * (c + c.transpose());
}

Mat covariance_standard_error(const std::vector<Vec>& samples) {
  const Vec m = empirical_mean(samples);
  const Mat c = empirical_covariance(samples);
  const Eigen::Index d = m.size();
  Mat m4 = Mat::Zero(d, d);
  for (const auto& s : samples) {
    const Vec r2 = (s - m).array().square();
    m4 += r2 * r2.transpose();
  }
  const double n = static_cast<double>(samples.size());
  m4 /= n;
  Mat se(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      se(i, j) = std::sqrt(std::max(m4(i, j) - c(i, j) * c(i, j), 0.0) / n);
    }
  }
  return se;
}

EnsembleStats summarize(const std::vector<Vec>& samples) {
  EnsembleStats s;
  s.count = samples.size();
  s.mean = empirical_mean(samples);
  s.covariance = empirical_covariance(samples);
  s.mean_stderr = (s.covariance.diagonal() / static_cast<double>(s.count)).cwiseSqrt();
  s.covariance_stderr = covariance_standard_error(samples);
  return s;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t index_at(double time, double dt) { return grid_steps(dt, time); }

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  const double den = m * sxx - sx * sx;
  if (m < 2 || !(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / den;
}

bool point_mass(const DriftLaw& law) { return law.kind == DriftLaw::Kind::kPoint; }

}  // namespace

LlnReport lln_experiment(const TracerModel& tm, const LlnOptions& opts) {
  if (opts.n_ladder.empty()) throw ModelError("LLN ladder is empty");
  if (!(opts.t > 0.0)) throw ModelError("LLN time t must be positive");
  for (std::size_t r = 0; r < opts.n_ladder.size(); ++r) {
    if (!(opts.n_ladder[r] > 0.0) || (r > 0 && !(opts.n_ladder[r] > opts.n_ladder[r - 1]))) {
      throw ModelError("LLN ladder must be positive and increasing");
    }
    (void)index_at(opts.n_ladder[r] * opts.t, opts.dt);
  }
  const double horizon = opts.n_ladder.back() * opts.t;
  const std::size_t rungs = opts.n_ladder.size();

  EnsembleSpec spec{opts.n_paths, opts.seed, opts.workers, 0};
  auto devs = run_ensemble(spec, [&](std::size_t, Rng& rng) {
    const TracerPath p = simulate_tracer(tm, opts.dt, horizon, rng);
    std::vector<double> out(rungs);
    const auto d = static_cast<Eigen::Index>(p.dimension);
    for (std::size_t r = 0; r < rungs; ++r) {
      const double n = opts.n_ladder[r];
      const auto x = p.x_at(index_at(n * opts.t, opts.dt));
      double sq = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double e = x[static_cast<std::size_t>(i)] / n - p.drift(i) * opts.t;
        sq += e * e;
      }
      out[r] = std::sqrt(sq);
    }
    return out;
  });

  LlnReport rep;
  rep.centering = point_mass(tm.drift_law()) ? "mean" : "conditional";
  std::vector<double> ns, means;
  for (std::size_t r = 0; r < rungs; ++r) {
    LlnRung rung;
    rung.n = opts.n_ladder[r];
    double s = 0.0, s2 = 0.0;
    for (const auto& v : devs) {
      s += v[r];
      s2 += v[r] * v[r];
      rung.max_deviation = std::max(rung.max_deviation, v[r]);
    }
    const double np = static_cast<double>(devs.size());
    rung.mean_deviation = s / np;
    const double var = np > 1 ? std::max(s2 - s * s / np, 0.0) / (np - 1.0) : 0.0;
    rung.standard_error = std::sqrt(var / np);
    ns.push_back(rung.n);
    means.push_back(rung.mean_deviation);
    rep.rungs.push_back(rung);
  }
  rep.slope = fit_loglog_slope(ns, means);
  rep.strictly_decreasing = true;
  for (std::size_t r = 1; r < rungs; ++r) {
    if (!(means[r] < means[r - 1])) rep.strictly_decreasing = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------

JumpCapResult jump_cap_check(const TracerPath& path, const TracerModel& tm, double n) {
  if (!(n > 0.0)) throw ModelError("scale n must be positive");
  JumpCapResult r;
  const double scale = 1.0 / std::sqrt(n);
  r.cap = 2.0 * tm.sup_w() * scale;
  r.bound = r.cap + tm.velocity().sup_bound() * path.driving.dt * scale;
  r.jumps = path.driving.jumps.size();
  const auto& fs = tm.functions();
  const std::size_t d = fs.size();
  std::vector<double> prev(d), cur(d);
  for (std::size_t i = 0; i < d; ++i) prev[i] = fs[i].evaluate(path.driving.state(0));
  for (std::size_t m = 1; m <= path.driving.steps; ++m) {
    for (std::size_t i = 0; i < d; ++i) {
      cur[i] = fs[i].evaluate(path.driving.state(m));
      const double di = path.integral[m * d + i] - path.integral[(m - 1) * d + i];
      r.max_rescaled_increment =
          std::max(r.max_rescaled_increment, std::abs(cur[i] - prev[i] - di) * scale);
    }
    std::swap(prev, cur);
  }
  r.pass = r.max_rescaled_increment <= r.bound * (1.0 + 1e-9);
  return r;
}

JumpCapResult merge(const JumpCapResult& a, const JumpCapResult& b) {
  JumpCapResult r;
  r.max_rescaled_increment = std::max(a.max_rescaled_increment, b.max_rescaled_increment);
  r.cap = std::max(a.cap, b.cap);
  r.bound = std::max(a.bound, b.bound);
  r.jumps = a.jumps + b.jumps;
  r.pass = a.pass && b.pass;
  return r;
}

namespace {

std::vector<KsResult> marginal_ks(const std::vector<Vec>& samples, const Mat& theory) {
  std::vector<KsResult> out;
  const Eigen::Index d = theory.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<double> xs;
    xs.reserve(samples.size());
    for (const auto& s : samples) xs.push_back(s(i));
    const double var = theory(i, i);
    if (!(var > 0.0)) {
      const double spread =
          std::max(std::abs(*std::max_element(xs.begin(), xs.end())),
                   std::abs(*std::min_element(xs.begin(), xs.end())));
      if (spread > 1e-12) {
        throw ModelError("theoretical variance is zero but the samples are not");
      }
      out.push_back({0.0, 1.0, xs.size()});
      continue;
    }
    out.push_back(ks_test(std::move(xs), [var](double x) { return normal_cdf(x, 0.0, var); }));
  }
  return out;
}

}  // namespace

CltReport clt_experiment(const TracerModel& tm, const Mat& c, const CltOptions& opts) {
  const auto d = static_cast<Eigen::Index>(tm.dimension());
  if (c.rows() != d || c.cols() != d) throw ModelError("theoretical C must be d x d");
  if (opts.t_grid.empty()) throw ModelError("CLT t grid is empty");
  if (!(opts.n > 0.0)) throw ModelError("CLT scale n must be positive");
  double t_max = 0.0;
  for (double t : opts.t_grid) {
    if (!(t > 0.0)) throw ModelError("CLT times must be positive");
    (void)index_at(opts.n * t, opts.dt);
    t_max = std::max(t_max, t);
  }
  const double horizon = opts.n * t_max;
  const Vec mean_drift = tm.drift_law().expectation();
  const double root_n = std::sqrt(opts.n);
  const std::size_t nt = opts.t_grid.size();

  struct PathOut {
    std::vector<Vec> conditional;
    std::vector<Vec> unconditional;
    JumpCapResult cap;
  };
  EnsembleSpec spec{opts.n_paths, opts.seed, opts.workers, 0};
  auto outs = run_ensemble(spec, [&](std::size_t, Rng& rng) {
    const TracerPath p = simulate_tracer(tm, opts.dt, horizon, rng);
    PathOut o;
    for (double t : opts.t_grid) {
      const auto x = p.x_at(index_at(opts.n * t, opts.dt));
      Vec cond(d), uncond(d);
      for (Eigen::Index i = 0; i < d; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        cond(i) = (xi - opts.n * p.drift(i) * t) / root_n;
        uncond(i) = (xi - opts.n * mean_drift(i) * t) / root_n;
      }
      o.conditional.push_back(std::move(cond));
      o.unconditional.push_back(std::move(uncond));
    }
    o.cap = jump_cap_check(p, tm, opts.n);
    return o;
  });

  CltReport rep;
  rep.pass = true;
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = opts.t_grid[k];
    std::vector<Vec> cond, uncond;
    cond.reserve(outs.size());
    uncond.reserve(outs.size());
    for (const auto& o : outs) {
      cond.push_back(o.conditional[k]);
      uncond.push_back(o.unconditional[k]);
    }
    CltRow row;
    row.t = t;
    row.theoretical = t * c;
    row.stats = summarize(cond);
    row.stats.ks = marginal_ks(cond, row.theoretical);
    row.unconditional = summarize(uncond);
    const double scale = row.theoretical.cwiseAbs().maxCoeff();
    const Mat diff = (row.stats.covariance - row.theoretical).cwiseAbs();
    row.relative_error = scale > 0.0 ? diff.maxCoeff() / scale
                                     : (diff.maxCoeff() > 0.0
                                            ? std::numeric_limits<double>::infinity()
                                            : 0.0);
    row.within_3se = (diff.array() <= 3.0 * row.stats.covariance_stderr.array() + 1e-15).all();
    for (const auto& ks : row.stats.ks) row.min_ks_p = std::min(row.min_ks_p, ks.p_value);
    if (!(row.relative_error < opts.tol_cov) || !(row.min_ks_p > opts.p_min)) rep.pass = false;
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < outs.size(); ++k) {
    rep.jump_cap = k == 0 ? outs[k].cap : merge(rep.jump_cap, outs[k].cap);
  }
  if (nt >= 2) {
    for (Eigen::Index i = 0; i < d; ++i) {
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& row : rep.rows) {
        const double r = row.stats.covariance(i, i) / row.t;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      if (lo > 0.0) rep.linearity_spread = std::max(rep.linearity_spread, hi / lo - 1.0);
    }
  }
  if (!point_mass(tm.drift_law())) {
    rep.notes.push_back("drift law is not a point mass; verdict uses per-path centering");
  }
  return rep;
}

// ---------------------------------------------------------------------------

DynkinReport dynkin_check(const TracerModel& tm, double horizon, std::size_t n_paths,
                          double dt, std::uint64_t seed, unsigned workers) {
  const std::size_t d = tm.functions().size();
  EnsembleSpec spec{n_paths, seed, workers, 0};
  // per path: d compensated values, then d half-resolution differences
  auto values = run_ensemble(spec, [&](std::size_t, Rng& rng) {
    const Vec f0 = tm.initial().sample(rng, tm.driving().period());
    const PathSample p = simulate_path(tm.driving(), f0, dt, horizon, rng);
    std::vector<double> prev(d), cur(d), integral(d, 0.0), coarse(d, 0.0), even(d, 0.0), anchor(d);
    tm.velocity().evaluate(p.state(0), prev);
    anchor = prev;
    for (std::size_t m = 1; m <= p.steps; ++m) {
      tm.velocity().evaluate(p.state(m), cur);
      for (std::size_t i = 0; i < d; ++i) integral[i] += 0.5 * dt * (prev[i] + cur[i]);
      if (m % 2 == 0) {
        for (std::size_t i = 0; i < d; ++i) {
          coarse[i] += dt * (anchor[i] + cur[i]);
          even[i] = integral[i];
        }
        anchor = cur;
      }
      std::swap(prev, cur);
    }
    std::vector<double> out(2 * d);
    for (std::size_t i = 0; i < d; ++i) {
      const auto& w = tm.functions()[i];
      out[i] = w.evaluate(p.state(p.steps)) - w.evaluate(p.state(0)) - integral[i];
      // Richardson: trapezoid error ~ (I_h - I_2h) / 3 on the even part of the grid
      out[d + i] = (even[i] - coarse[i]) / 3.0;
    }
    return out;
  });
  require_samples(values.size());
  DynkinReport rep;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < d; ++i) {
    double s = 0.0, s2 = 0.0, b = 0.0;
    for (const auto& v : values) {
      s += v[i];
      s2 += v[i] * v[i];
      b += v[d + i];
    }
    const double mean = s / n;
    const double var = std::max(s2 - s * s / n, 0.0) / (n - 1.0);
    const double se = std::sqrt(var / n);
    const double bias = std::abs(b / n);
    rep.mean.push_back(mean);
    rep.standard_error.push_back(se);
    rep.discretization.push_back(bias);
    const double scale = std::hypot(se, bias);
    const double z = scale > 0.0 ? mean / scale : (mean == 0.0 ? 0.0 : std::copysign(1e300, mean));
    rep.z.push_back(z);
    rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
  }
  return rep;
}

}  // namespace tracer
