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

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "tracer/simulate.hpp"
#include "tracer/symbols.hpp"
#include "tracer/torus.hpp"

namespace testing {

using namespace tracer;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vec circle() { return Vec::Constant(1, kTwoPi); }

inline std::shared_ptr<const DrivingModel> make_model(DrivingModel::Spec spec) {
  return std::make_shared<const DrivingModel>(std::move(spec));
}

inline DrivingModel::Spec base_spec(int d = 1, std::optional<Vec> period = circle()) {
  DrivingModel::Spec s;
  s.dimension = d;
  s.drift.assign(static_cast<std::size_t>(d), ScalarField(0.0));
  s.diffusion.assign(static_cast<std::size_t>(d * d), ScalarField(0.0));
  s.period = std::move(period);
  return s;
}

/// Lattice jumps +-kappa at unit rate on the 2 pi circle.
inline std::shared_ptr<const DrivingModel> rm3(double kappa = 1.0) {
  auto s = base_spec();
  s.jumps = AtomicJumps{{{vec({kappa}), 1.0}, {vec({-kappa}), 1.0}}};
  s.name = "rm3";
  return make_model(std::move(s));
}

inline std::shared_ptr<const DrivingModel> brownian(double c = 1.0) {
  auto s = base_spec();
  s.diffusion[0] = c;
  s.name = "brownian";
  return make_model(std::move(s));
}

inline std::shared_ptr<const DrivingModel> stable(double alpha = 1.5, double gamma = 1.0) {
  auto s = base_spec();
  s.jumps = StableJumps{alpha, gamma};
  s.name = "stable";
  return make_model(std::move(s));
}

inline std::shared_ptr<const DrivingModel> pure_drift(double b = 1.0) {
  auto s = base_spec();
  s.drift[0] = b;
  s.name = "pure_drift";
  return make_model(std::move(s));
}

inline std::shared_ptr<const DrivingModel> zero_process() { return make_model(base_spec()); }

/// Gaussian jumps N(0, sd^2) at constant rate.
inline std::shared_ptr<const DrivingModel> gaussian_jumps(double rate, double sd,
                                                          double mean = 0.0) {
  auto s = base_spec();
  s.jumps = DensityJumps{rate, GaussianMixtureLaw{{{1.0, vec({mean}), vec({sd})}}}};
  return make_model(std::move(s));
}

/// Periodic state-dependent model matching configs/feller.json.
inline std::shared_ptr<const DrivingModel> feller() {
  auto s = base_spec();
  const Vec p = circle();
  s.drift[0] = ScalarField(PeriodicFunction::sine(p, 0, 1, 0.3));
  s.diffusion[0] = ScalarField(PeriodicFunction::constant(p, 0.5) + PeriodicFunction::cosine(p, 0, 1, 0.25));
  s.jumps = DensityJumps{
      ScalarField(PeriodicFunction::constant(p, 1.0) + PeriodicFunction::sine(p, 0, 1, 0.5)),
      GaussianMixtureLaw{{{1.0, vec({0.0}), vec({0.5})}}}};
  s.name = "feller";
  return make_model(std::move(s));
}

inline PeriodicFunction sin1() { return PeriodicFunction::sine(circle(), 0); }
inline PeriodicFunction cos1() { return PeriodicFunction::cosine(circle(), 0); }
/// sin + (1/2) cos(2 x)
inline PeriodicFunction mixed() {
  return sin1() + PeriodicFunction::cosine(circle(), 0, 2, 0.5);
}

inline TracerModel tracer_for(std::shared_ptr<const DrivingModel> m,
                              std::vector<PeriodicFunction> w, double sigma = 0.0,
                              InitialLaw::Kind init = InitialLaw::Kind::kUniformTorus) {
  const auto d = static_cast<Eigen::Index>(w.size());
  DriftLaw drift;
  drift.mean = Vec::Zero(d);
  InitialLaw initial;
  initial.kind = init;
  initial.point = Vec::Zero(m->dimension());
  return TracerModel(std::move(m), std::move(w), sigma * Mat::Identity(d, d), drift, initial,
                     Vec::Zero(d));
}

}  // namespace testing
