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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracer/simulate.hpp"
#include "tracer/symbols.hpp"

namespace tracer {

struct RunSpec {
  std::size_t n_paths = 400;
  double dt = 1e-2;
  std::optional<double> horizon;  // simulate
  double n = 2000.0;              // clt scale
  std::vector<double> n_ladder = {250.0, 1000.0, 4000.0};
  double t = 1.0;                 // lln time
  std::vector<double> t_grid = {1.0};
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  int k_max = 64;
  int quadrature_grid = 512;
  double tol_cov = 0.10;
  double p_min = 0.01;
  std::size_t dump_paths = 0;
  FrequencyConvention convention = FrequencyConvention::kPerAxis;
  double eps_zero = 1e-12;
  double pilot_horizon = 5000.0;
  int pilot_bins = 64;
};

struct OutputSpec {
  std::string dir = "out";
  std::vector<std::string> formats = {"json", "csv", "text"};
  bool wants(const std::string& f) const;
};

struct TracerSpec {
  std::vector<PeriodicFunction> functions;
  Mat noise_covariance;
  DriftLaw drift_law;
  InitialLaw initial;
  Vec x0;
};

struct ExperimentConfig {
  std::string name;
  std::shared_ptr<const DrivingModel> model;
  std::optional<TracerSpec> tracer;
  RunSpec run;
  OutputSpec output;
  /// Canonical form (effective seed filled in, workers and output removed).
  nlohmann::json canonical;
  std::string hash;  // 16 hex digits, FNV-1a 64 of canonical.dump()

  std::uint64_t seed() const;
  /// Throws ConfigError when the config has no tracer section.
  TracerModel tracer_model() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
};

/// Parses a JSON experiment file (comments allowed). Unknown keys, bad
/// values and invalid models raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& ov = {});
ExperimentConfig parse_config(const std::string& text, const Overrides& ov = {});

/// "2pi", "pi/2", "3.5", "2*pi" and plain numbers.
double parse_length(const nlohmann::json& value);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace tracer
