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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <thread>
#include <type_traits>
#include <vector>

#include "tracer/error.hpp"
#include "tracer/generator.hpp"
#include "tracer/rng.hpp"
#include "tracer/symbols.hpp"

namespace tracer {

struct JumpEvent {
  double time = 0.0;
  Vec size;
};

/// Trajectory of the driving process on a uniform grid t_m = m dt.
struct PathSample {
  int dimension = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::vector<double> states;  // (steps + 1) x dimension, row-major
  std::vector<double> torus;   // projected states; empty without a period
  Vec period;                  // empty without a period
  std::vector<JumpEvent> jumps;  // finite-activity jumps only
  std::uint64_t stream = 0;

  double horizon() const { return dt * static_cast<double>(steps); }
  double time(std::size_t m) const { return dt * static_cast<double>(m); }
  std::span<const double> state(std::size_t m) const {
    return {states.data() + m * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }
  std::span<const double> torus_state(std::size_t m) const {
    return {torus.data() + m * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }
  bool has_torus() const { return !torus.empty(); }
};

/// Number of grid steps for horizon T at step dt; T must be a multiple of dt.
std::size_t grid_steps(double dt, double horizon);

/// Exact-in-law increment of a Levy model over time h, added into `state`.
/// Finite-activity jumps are reported through `on_jump(offset_in_step, y)`.
void levy_increment(const DrivingModel& model, double h, Rng& rng, std::span<double> state,
                    const std::function<void(double, const Vec&)>& on_jump = {});

/// Levy path with exact per-step increments.
PathSample levy_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                     Rng& rng);

/// Euler scheme for state-dependent models, jumps from the frozen-state law
/// applied at step end.
PathSample feller_path(const DrivingModel& model, const Vec& x0, double dt, double horizon,
                       Rng& rng);

/// levy_path for Levy models, feller_path otherwise.
PathSample simulate_path(const DrivingModel& model, const Vec& x0, double dt,
                         double horizon, Rng& rng);

// ---------------------------------------------------------------------------
// Tracer
// ---------------------------------------------------------------------------

/// Law of the constant tracer drift D (mean is the limiting velocity).
struct DriftLaw {
  enum class Kind { kPoint, kNormal, kEmpirical };
  Kind kind = Kind::kPoint;
  Vec mean;
  Mat covariance;           // kNormal
  std::vector<Vec> values;  // kEmpirical

  Vec sample(Rng& rng) const;
  Vec expectation() const;
};

/// Initial law of the driving process.
struct InitialLaw {
  enum class Kind { kPoint, kUniformTorus, kNormal };
  Kind kind = Kind::kPoint;
  Vec point;
  Mat covariance;  // kNormal, around `point`

  Vec sample(Rng& rng, const std::optional<Vec>& period) const;
};

/// dX = v(F_t) dt + D dt + Sigma^{1/2} dB with v = (A w^1, ..., A w^d).
class TracerModel {
 public:
  TracerModel(std::shared_ptr<const DrivingModel> driving, std::vector<PeriodicFunction> w,
              Mat noise_covariance, DriftLaw drift_law, InitialLaw initial, Vec x0,
              GeneratorOptions opts = {});

  const DrivingModel& driving() const { return *driving_; }
  std::shared_ptr<const DrivingModel> driving_ptr() const { return driving_; }
  const std::vector<PeriodicFunction>& functions() const { return w_; }
  const VelocityField& velocity() const { return *velocity_; }
  const Mat& noise_covariance() const { return sigma_; }
  const Mat& noise_sqrt() const { return sigma_sqrt_; }
  const DriftLaw& drift_law() const { return drift_law_; }
  const InitialLaw& initial() const { return initial_; }
  const Vec& x0() const { return x0_; }
  int dimension() const { return static_cast<int>(w_.size()); }
  /// max_i sup |w^i| (upper bound from the coefficient l1 norm).
  double sup_w() const;

 private:
  std::shared_ptr<const DrivingModel> driving_;
  std::vector<PeriodicFunction> w_;
  Mat sigma_;
  Mat sigma_sqrt_;
  DriftLaw drift_law_;
  InitialLaw initial_;
  Vec x0_;
  std::unique_ptr<VelocityField> velocity_;
};

struct TracerPath {
  PathSample driving;
  Vec drift;                  // sampled D
  std::vector<double> x;      // (steps + 1) x d
  std::vector<double> integral;  // I_t = int_0^t v(F_s) ds (trapezoid)
  std::vector<double> noise;     // (Sigma^{1/2} B)_t
  int dimension = 0;

  std::span<const double> x_at(std::size_t m) const {
    return {x.data() + m * static_cast<std::size_t>(dimension), static_cast<std::size_t>(dimension)};
  }
  std::span<const double> integral_at(std::size_t m) const {
    return {integral.data() + m * static_cast<std::size_t>(dimension),
            static_cast<std::size_t>(dimension)};
  }
};

/// Assembles X along a given driving path, drawing D and B from `rng`.
TracerPath tracer_path(const TracerModel& tm, PathSample driving, Rng& rng);

/// Draws F_0, simulates the driving path and assembles the tracer.
TracerPath simulate_tracer(const TracerModel& tm, double dt, double horizon, Rng& rng);

// ---------------------------------------------------------------------------
// Ensembles
// ---------------------------------------------------------------------------

struct EnsembleSpec {
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;          // 0 = hardware concurrency
  std::uint64_t stream_offset = 0;  // path i uses stream stream_offset + i
};

unsigned resolve_workers(unsigned requested);

/// Runs per_path(index, rng) for every path on up to `workers` threads. Path
/// i always draws from stream (seed, stream_offset + i) and results come back
/// in path order, so the output does not depend on the worker count.
template <class F>
auto run_ensemble(const EnsembleSpec& spec, F&& per_path)
    -> std::vector<std::invoke_result_t<F&, std::size_t, Rng&>> {
  using R = std::invoke_result_t<F&, std::size_t, Rng&>;
  if (spec.n_paths < 1) throw ModelError("ensemble needs at least one path");
  std::vector<R> results(spec.n_paths);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.n_paths) return;
      try {
        Rng rng(spec.seed, spec.stream_offset + i);
        results[i] = per_path(i, rng);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(spec.n_paths);
      }
    }
  };
  const unsigned workers =
      std::min<unsigned>(resolve_workers(spec.workers), static_cast<unsigned>(spec.n_paths));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace tracer
