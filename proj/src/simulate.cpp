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

#include "tracer/simulate.hpp"

#include <cmath>

#include "tracer/error.hpp"

namespace tracer {

std::size_t grid_steps(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw ModelError("time grid needs dt > 0 and a finite horizon >= 0");
  }
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio)) {
    throw ModelError("horizon must be an integer multiple of dt");
  }
  return static_cast<std::size_t>(steps);
}

namespace {

PathSample empty_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                      std::uint64_t stream) {
  if (x0.size() != model.dimension()) throw ModelError("initial state dimension mismatch");
  if (!x0.allFinite()) throw ModelError("initial state must be finite");
  PathSample p;
  p.dimension = model.dimension();
  p.dt = dt;
  p.steps = grid_steps(dt, horizon);
  p.stream = stream;
  const auto d = static_cast<std::size_t>(p.dimension);
  p.states.resize((p.steps + 1) * d);
  std::copy(x0.data(), x0.data() + x0.size(), p.states.begin());
  return p;
}

void finish_path(const DrivingModel& model, PathSample& p) {
  for (double v : p.states) {
    if (!std::isfinite(v)) throw NumericalError("simulated state became non-finite");
  }
  if (model.period()) {
    p.period = *model.period();
    p.torus.resize(p.states.size());
    const auto d = static_cast<std::size_t>(p.dimension);
    for (std::size_t m = 0; m <= p.steps; ++m) {
      project_into(std::span<const double>(p.states.data() + m * d, d), *model.period(),
                   std::span<double>(p.torus.data() + m * d, d));
    }
  }
}

/// Sorted uniform jump times inside (t, t + dt] for `count` jumps.
void log_jumps(std::vector<JumpEvent>& log, double t, double dt,
               std::vector<std::pair<double, Vec>>& pending) {
  std::sort(pending.begin(), pending.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [offset, y] : pending) {
    double time = t + offset * dt;
    if (!log.empty() && time <= log.back().time) {
      time = std::nextafter(log.back().time, std::numeric_limits<double>::infinity());
    }
    log.push_back({time, std::move(y)});
  }
  pending.clear();
}

}  // namespace

void levy_increment(const DrivingModel& model, double h, Rng& rng, std::span<double> state,
                    const std::function<void(double, const Vec&)>& on_jump) {
  if (!model.is_levy()) throw UnsupportedError("exact increments require a Levy model");
  const int d = model.dimension();
  const Vec zero = Vec::Zero(d);
  const Vec b = model.effective_drift(zero);
  for (int i = 0; i < d; ++i) state[static_cast<std::size_t>(i)] += b(i) * h;

  if (model.has_diffusion()) {
    const Mat root = symmetric_sqrt(model.diffusion(zero));
    Vec z(d);
    for (int i = 0; i < d; ++i) z(i) = rng.normal();
    const Vec inc = std::sqrt(h) * (root * z);
    for (int i = 0; i < d; ++i) state[static_cast<std::size_t>(i)] += inc(i);
  }

  const JumpMeasure& jumps = model.jumps();
  if (const auto* a = std::get_if<AtomicJumps>(&jumps)) {
    for (const auto& atom : a->atoms) {
      const std::uint64_t count = rng.poisson(atom.rate * h);
      for (std::uint64_t c = 0; c < count; ++c) {
        for (int i = 0; i < d; ++i) state[static_cast<std::size_t>(i)] += atom.location(i);
        if (on_jump) on_jump(rng.uniform(), atom.location);
      }
    }
  } else if (const auto* dj = std::get_if<DensityJumps>(&jumps)) {
    const std::uint64_t count = rng.poisson(model.jump_rate(zero) * h);
    Vec y(d);
    for (std::uint64_t c = 0; c < count; ++c) {
      sample_jump_law(dj->law, rng, std::span<double>(y.data(), y.size()));
      for (int i = 0; i < d; ++i) state[static_cast<std::size_t>(i)] += y(i);
      if (on_jump) on_jump(rng.uniform(), y);
    }
  } else if (std::holds_alternative<StableJumps>(jumps)) {
    const double alpha = model.stable_alpha(zero);
    const double scale = std::pow(model.stable_gamma(zero) * h, 1.0 / alpha);
    Vec s(d);
    rng.isotropic_stable(alpha, std::span<double>(s.data(), s.size()));
    for (int i = 0; i < d; ++i) state[static_cast<std::size_t>(i)] += scale * s(i);
  }
}

PathSample levy_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                     Rng& rng) {
  if (!model.is_levy()) throw UnsupportedError("levy_path requires a Levy model");
  PathSample p = empty_path(model, x0, dt, horizon, rng.stream());
  const auto d = static_cast<std::size_t>(p.dimension);
  std::vector<std::pair<double, Vec>> pending;
  auto record = [&pending](double offset, const Vec& y) { pending.emplace_back(offset, y); };
  for (std::size_t m = 0; m < p.steps; ++m) {
    double* cur = p.states.data() + m * d;
    double* nxt = cur + d;
    std::copy(cur, cur + d, nxt);
    levy_increment(model, dt, rng, std::span<double>(nxt, d), record);
    if (!pending.empty()) log_jumps(p.jumps, p.time(m), dt, pending);
  }
  finish_path(model, p);
  return p;
}

PathSample feller_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                       Rng& rng) {
  const auto& jumps = model.jumps();
  const bool stable = std::holds_alternative<StableJumps>(jumps);
  if (!stable) {
    const double rate_max = model.bounds().jump_rate;
    if (!std::isfinite(rate_max)) throw NumericalError("jump rate unbounded on the probe grid");
    if (dt * rate_max > 0.5) {
      throw NumericalError("time step too coarse for the jump intensity (dt * rate > 0.5)");
    }
  }
  PathSample p = empty_path(model, x0, dt, horizon, rng.stream());
  const int dim = p.dimension;
  const auto d = static_cast<std::size_t>(dim);
  const double sqrt_dt = std::sqrt(dt);
  Vec x(dim), z(dim), y(dim), s(dim);
  std::vector<std::pair<double, Vec>> pending;

  for (std::size_t m = 0; m < p.steps; ++m) {
    const double* cur = p.states.data() + m * d;
    double* nxt = p.states.data() + (m + 1) * d;
    for (int i = 0; i < dim; ++i) x(i) = cur[i];

    Vec next = x + model.effective_drift(x) * dt;
    if (model.has_diffusion()) {
      const Mat c = model.diffusion(x);
      for (int i = 0; i < dim; ++i) z(i) = rng.normal();
      if (dim == 1) {
        next(0) += std::sqrt(std::max(c(0, 0), 0.0)) * sqrt_dt * z(0);
      } else {
        next += symmetric_sqrt(c) * z * sqrt_dt;
      }
    }
    if (const auto* a = std::get_if<AtomicJumps>(&jumps)) {
      for (const auto& atom : a->atoms) {
        const std::uint64_t count = rng.poisson(atom.rate * dt);
        for (std::uint64_t c = 0; c < count; ++c) {
          next += atom.location;
          pending.emplace_back(rng.uniform(), atom.location);
        }
      }
    } else if (const auto* dj = std::get_if<DensityJumps>(&jumps)) {
      const std::uint64_t count = rng.poisson(dj->rate(x) * dt);
      for (std::uint64_t c = 0; c < count; ++c) {
        sample_jump_law(dj->law, rng, std::span<double>(y.data(), y.size()));
        next += y;
        pending.emplace_back(rng.uniform(), y);
      }
    } else if (stable) {
      const double alpha = model.stable_alpha(x);
      const double scale = std::pow(model.stable_gamma(x) * dt, 1.0 / alpha);
      rng.isotropic_stable(alpha, std::span<double>(s.data(), s.size()));
      next += scale * s;
    }
    for (int i = 0; i < dim; ++i) nxt[i] = next(i);
    if (!pending.empty()) log_jumps(p.jumps, p.time(m), dt, pending);
  }
  finish_path(model, p);
  return p;
}

PathSample simulate_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                         Rng& rng) {
  return model.is_levy() ? levy_path(model, x0, dt, horizon, rng)
                         : feller_path(model, x0, dt, horizon, rng);
}

// ---------------------------------------------------------------------------

Vec DriftLaw::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kPoint:
      return mean;
    case Kind::kNormal: {
      Vec z(mean.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      return mean + symmetric_sqrt(covariance) * z;
    }
    case Kind::kEmpirical: {
      const auto n = values.size();
      auto idx = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
      return values[std::min(idx, n - 1)];
    }
  }
  return mean;
}

Vec DriftLaw::expectation() const {
  if (kind != Kind::kEmpirical) return mean;
  Vec acc = Vec::Zero(values.front().size());
  for (const auto& v : values) acc += v;
  return acc / static_cast<double>(values.size());
}

Vec InitialLaw::sample(Rng& rng, const std::optional<Vec>& period) const {
  switch (kind) {
    case Kind::kPoint:
      return point;
    case Kind::kUniformTorus: {
      if (!period) throw ModelError("uniform initial law needs a periodic model");
      Vec x(period->size());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = (*period)(i) * rng.uniform();
      return x;
    }
    case Kind::kNormal: {
      Vec z(point.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      return point + symmetric_sqrt(covariance) * z;
    }
  }
  return point;
}

TracerModel::TracerModel(std::shared_ptr<const DrivingModel> driving,
                         std::vector<PeriodicFunction> w, Mat noise_covariance,
                         DriftLaw drift_law, InitialLaw initial, Vec x0,
                         GeneratorOptions opts)
    : driving_(std::move(driving)), w_(std::move(w)), sigma_(std::move(noise_covariance)),
      drift_law_(std::move(drift_law)), initial_(std::move(initial)), x0_(std::move(x0)) {
  if (!driving_) throw ModelError("tracer needs a driving model");
  if (w_.empty()) throw ModelError("tracer needs at least one test function");
  const auto d = static_cast<Eigen::Index>(w_.size());
  for (const auto& f : w_) {
    if (f.dimension() != driving_->dimension()) {
      throw ModelError("test function dimension must match the driving model");
    }
    if ((f.period() - w_.front().period()).cwiseAbs().maxCoeff() > 0.0) {
      throw ModelError("test functions must share one period");
    }
  }
  if (driving_->period() &&
      (w_.front().period() - *driving_->period()).cwiseAbs().maxCoeff() >
          1e-12 * driving_->period()->cwiseAbs().maxCoeff()) {
    throw ModelError("test function period differs from the driving model period");
  }
  if (sigma_.rows() != d || sigma_.cols() != d) {
    throw ModelError("noise covariance must be d x d with d = number of test functions");
  }
  try {
    sigma_sqrt_ = symmetric_sqrt(sigma_);
  } catch (const NumericalError& e) {
    throw ModelError(std::string("noise covariance: ") + e.what());
  }
  if (x0_.size() != d) throw ModelError("tracer x0 dimension mismatch");
  if (drift_law_.kind == DriftLaw::Kind::kEmpirical) {
    if (drift_law_.values.empty()) throw ModelError("empirical drift law needs values");
    for (const auto& v : drift_law_.values) {
      if (v.size() != d) throw ModelError("drift law value dimension mismatch");
    }
  } else if (drift_law_.mean.size() != d) {
    throw ModelError("drift law mean dimension mismatch");
  }
  if (drift_law_.kind == DriftLaw::Kind::kNormal) {
    if (drift_law_.covariance.rows() != d || drift_law_.covariance.cols() != d) {
      throw ModelError("drift law covariance must be d x d");
    }
    (void)symmetric_sqrt(drift_law_.covariance);
  }
  if (initial_.kind != InitialLaw::Kind::kUniformTorus &&
      initial_.point.size() != driving_->dimension()) {
    throw ModelError("initial law dimension mismatch");
  }
  if (initial_.kind == InitialLaw::Kind::kUniformTorus && !driving_->period()) {
    throw ModelError("uniform initial law needs a periodic driving model");
  }
  velocity_ = std::make_unique<VelocityField>(*driving_, w_, opts);
}

double TracerModel::sup_w() const {
  double s = 0.0;
  for (const auto& f : w_) s = std::max(s, f.coefficient_l1());
  return s;
}

TracerPath tracer_path(const TracerModel& tm, PathSample driving, Rng& rng) {
  if (driving.dimension != tm.driving().dimension()) {
    throw ModelError("driving path dimension does not match the tracer model");
  }
  TracerPath out;
  const int dim = tm.dimension();
  const auto d = static_cast<std::size_t>(dim);
  const std::size_t rows = driving.steps + 1;
  out.dimension = dim;
  out.drift = tm.drift_law().sample(rng);
  out.x.resize(rows * d);
  out.integral.assign(rows * d, 0.0);
  out.noise.assign(rows * d, 0.0);

  const VelocityField& v = tm.velocity();
  std::vector<double> v_prev(d), v_cur(d);
  v.evaluate(driving.state(0), v_prev);
  const bool has_noise = tm.noise_covariance().cwiseAbs().maxCoeff() > 0.0;
  const Mat root = tm.noise_sqrt() * std::sqrt(driving.dt);
  Vec z(dim);
  const double half_dt = 0.5 * driving.dt;

  for (std::size_t m = 1; m < rows; ++m) {
    v.evaluate(driving.state(m), v_cur);
    for (std::size_t i = 0; i < d; ++i) {
      out.integral[m * d + i] = out.integral[(m - 1) * d + i] + half_dt * (v_prev[i] + v_cur[i]);
    }
    if (has_noise) {
      for (int i = 0; i < dim; ++i) z(i) = rng.normal();
      const Vec inc = root * z;
      for (std::size_t i = 0; i < d; ++i) {
        out.noise[m * d + i] = out.noise[(m - 1) * d + i] + inc(static_cast<Eigen::Index>(i));
      }
    }
    std::swap(v_prev, v_cur);
  }
  for (std::size_t m = 0; m < rows; ++m) {
    const double t = driving.time(m);
    for (std::size_t i = 0; i < d; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      out.x[m * d + i] = tm.x0()(ii) + out.drift(ii) * t + out.integral[m * d + i] +
                         out.noise[m * d + i];
    }
  }
  out.driving = std::move(driving);
  return out;
}

TracerPath simulate_tracer(const TracerModel& tm, double dt, double horizon, Rng& rng) {
  const Vec f0 = tm.initial().sample(rng, tm.driving().period());
  PathSample path = simulate_path(tm.driving(), f0, dt, horizon, rng);
  return tracer_path(tm, std::move(path), rng);
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

}  // namespace tracer
