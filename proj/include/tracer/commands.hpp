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

#include <iosfwd>
#include <string>

#include "tracer/config.hpp"
#include "tracer/ergodic.hpp"

namespace tracer {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 1,     // verdict or hard check failed
  kExitUsage = 2,      // usage or configuration error
  kExitNumerical = 3,  // internal numerical failure
};

struct CommandOptions {
  bool force = false;  // run covariance even when hard checks fail
  bool pilot = false;  // allow pilot-run covariance for models without a torus
  std::ostream* text = nullptr;  // human-readable tables (nullptr = silent)
};

int cmd_check(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_covariance(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_lln(const ExperimentConfig& cfg, const CommandOptions& opts);
int cmd_clt(const ExperimentConfig& cfg, const CommandOptions& opts);

/// Dispatches by name and maps library exceptions onto exit codes, writing
/// the message to `err`.
int run_command(const std::string& name, const ExperimentConfig& cfg,
                const CommandOptions& opts, std::ostream& err);

/// Theoretical C for the tracer: series for periodic Levy models, pilot
/// histogram quadrature for periodic state-dependent models, a pilot path
/// average when `allow_pilot` is set, ConfigError otherwise.
CovarianceReport theoretical_covariance(const ExperimentConfig& cfg, bool allow_pilot);

}  // namespace tracer
