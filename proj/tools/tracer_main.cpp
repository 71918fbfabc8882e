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

// Command-line front end: tracer <check|covariance|simulate|lln|clt> --config FILE

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tracer/commands.hpp"
#include "tracer/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Passive tracer experiments driven by Levy-type processes"};
  app.set_version_flag("--version", tracer::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out_dir;
  tracer::CommandOptions opts;
  bool quiet = false;

  const std::pair<const char*, const char*> commands[] = {
      {"check", "Run the condition checkers"},
      {"covariance", "Compute the limiting covariance by series and quadrature"},
      {"simulate", "Simulate an ensemble of tracer paths"},
      {"lln", "Law of large numbers experiment over an n ladder"},
      {"clt", "Central limit experiment against the theoretical covariance"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "Override run.seed");
    sub->add_option("--workers", workers, "Worker threads (0 = all cores)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--force", opts.force, "Compute even when hard checks fail");
    sub->add_flag("--pilot", opts.pilot, "Allow a pilot-run covariance estimate");
    sub->add_flag("-q,--quiet", quiet, "No tables on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tracer::kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  tracer::ExperimentConfig cfg;
  try {
    cfg = tracer::load_config(config_path, {seed, workers, out_dir});
  } catch (const tracer::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return tracer::kExitUsage;
  }
  if (!quiet) opts.text = &std::cout;
  return tracer::run_command(command, cfg, opts, std::cerr);
}
