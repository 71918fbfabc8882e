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

#include "tracer/commands.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "tracer/error.hpp"
#include "tracer/report.hpp"
#include "tracer/stats.hpp"

namespace tracer {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pilot runs draw from a stream no ensemble path uses.
constexpr std::uint64_t kPilotStream = std::uint64_t{1} << 62;

class Output {
 public:
  Output(const ExperimentConfig& cfg, std::string command, const CommandOptions& opts)
      : cfg_(cfg), command_(std::move(command)), opts_(opts), dir_(cfg.output.dir) {}

  void json_file(const std::string& name, json j) {
    if (!cfg_.output.wants("json")) return;
    j["config_hash"] = cfg_.hash;
    write_json(dir_ / name, j);
    files_.push_back(name);
  }
  void csv_file(const std::string& name, const CsvTable& t) {
    if (!cfg_.output.wants("csv")) return;
    write_file(dir_ / name, "# config_hash=" + cfg_.hash + "\n" + t.str());
    files_.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    if (opts_.text) *opts_.text << body;
    if (!cfg_.output.wants("text")) return;
    write_file(dir_ / name, body);
    files_.push_back(name);
  }
  void finish(json extra = json::object()) {
    write_json(dir_ / "config.json", cfg_.canonical);
    json m;
    m["tool"] = "tracer";
    m["version"] = kVersion;
    m["command"] = command_;
    m["config_hash"] = cfg_.hash;
    m["seed"] = cfg_.run.seed ? json(*cfg_.run.seed) : json(nullptr);
    m["files"] = files_;
    for (auto& [k, v] : extra.items()) m[k] = v;
    write_json(dir_ / "manifest.json", m);
  }

 private:
  const ExperimentConfig& cfg_;
  std::string command_;
  const CommandOptions& opts_;
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string header(const ExperimentConfig& cfg, const std::string& what) {
  return what + " (" + cfg.name + ", config " + cfg.hash + ")\n";
}

std::string yes_no(bool b) { return b ? "pass" : "FAIL"; }

std::vector<Vec> sector_frequencies(const DrivingModel& model, int k_max) {
  std::vector<Vec> xi;
  if (model.period()) {
    for (const auto& k : lattice_shells(model.dimension(), std::min(k_max, 8))) {
      xi.push_back(dual_frequency(k, *model.period()));
    }
  } else {
    for (double r : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      for (int j = 0; j < model.dimension(); ++j) {
        Vec v = Vec::Zero(model.dimension());
        v(j) = r;
        xi.push_back(v);
        xi.push_back(-v);
      }
    }
  }
  return xi;
}

struct CheckOutcome {
  json report;
  std::string text;
  bool hard_pass = true;
  std::optional<ErgodicityCheck> ergodicity;
};

CheckOutcome run_checks(const ExperimentConfig& cfg) {
  const DrivingModel& model = *cfg.model;
  const auto probes = model.probe_points(5);
  CheckOutcome out;
  json& r = out.report;
  TextTable table({"check", "kind", "result", "detail"});
  std::vector<std::string> notes;

  const auto& b = model.bounds();
  const bool bounded = std::isfinite(b.drift) && std::isfinite(b.diffusion) &&
                       std::isfinite(b.jump_activity);
  r["boundedness"] = {{"pass", bounded},
                      {"drift", b.drift},
                      {"diffusion", b.diffusion},
                      {"jump_activity", b.jump_activity}};
  table.add_row({"boundedness", "hard", yes_no(bounded),
                 "sup|b|=" + cell(b.drift) + " sup|c|=" + cell(b.diffusion) +
                     " activity=" + cell(b.jump_activity)});
  out.hard_pass &= bounded;

  const bool conservative = check_conservative(model, probes);
  r["conservative"] = {{"pass", conservative}};
  table.add_row({"conservative", "hard", yes_no(conservative), "q(x, 0) = 0 on probes"});
  out.hard_pass &= conservative;

  if (model.is_levy() && model.period()) {
    const auto e = check_ergodicity_condition(model, cfg.run.k_max, cfg.run.convention,
                                              cfg.run.eps_zero);
    out.ergodicity = e;
    r["lattice_positivity"] = to_json(e);
    std::string detail = "min Re q = " + cell(e.min_re_q) + " up to |k| <= " +
                         std::to_string(e.k_max);
    if (e.k0) detail += ", k0 = " + to_json(*e.k0).dump();
    table.add_row({"lattice_positivity", "hard", to_string(e.verdict), detail});
    out.hard_pass &= e.verdict != ErgodicityCheck::Verdict::kFail;

    const auto hint = check_strong_ergodicity_hint(model, cfg.run.k_max, 0.05, cfg.run.convention);
    r["strong_ergodicity"] = to_json(hint);
    table.add_row({"strong_ergodicity", "soft",
                   hint.not_strongly_ergodic ? "not implied" : "no obstruction seen",
                   "outer-shell min Re q = " + cell(hint.outer_min)});
    if (e.verdict == ErgodicityCheck::Verdict::kPass) {
      notes.push_back("lattice positivity holds; strong ergodicity not implied");
    }
    if (hint.not_strongly_ergodic) {
      notes.push_back("Re q comes close to 0 at high frequency; no uniform spectral gap");
    }
    if (cfg.tracer) {
      json s = json::array();
      for (std::size_t i = 0; i < cfg.tracer->functions.size(); ++i) {
        const auto rep = check_summability(cfg.tracer->functions[i], model, cfg.run.k_max,
                                           cfg.run.convention, cfg.run.eps_zero);
        s.push_back(to_json(rep));
        table.add_row({"summability w" + std::to_string(i + 1), "soft", to_string(rep.verdict),
                       "sum = " + cell(rep.total)});
      }
      r["summability"] = s;
    }
  } else {
    r["lattice_positivity"] = nullptr;
    table.add_row({"lattice_positivity", "hard", "n/a", "needs a periodic Levy model"});
  }

  const auto sector = check_sector_condition(model, probes, sector_frequencies(model, cfg.run.k_max),
                                             cfg.run.eps_zero);
  r["sector"] = to_json(sector);
  table.add_row({"sector", "soft", yes_no(sector.pass), "c = " + cell(sector.c)});

  const auto heat = check_heat_kernel_integrability(model, 1.0, 50.0, probes);
  r["heat_kernel"] = to_json(heat);
  table.add_row({"heat_kernel", "soft", to_string(heat.verdict),
                 "tail fraction = " + cell(heat.tail_fraction)});

  r["notes"] = notes;
  r["pass"] = out.hard_pass;
  out.text = header(cfg, "condition checks") + table.str();
  for (const auto& n : notes) out.text += "note: " + n + "\n";
  out.text += std::string("overall: ") + (out.hard_pass ? "pass" : "FAIL") + "\n";
  return out;
}

PilotOptions pilot_options(const ExperimentConfig& cfg) {
  PilotOptions p;
  p.horizon = cfg.run.pilot_horizon;
  p.bins_per_axis = cfg.run.pilot_bins;
  p.dt = cfg.run.dt;
  p.seed = cfg.seed();
  p.stream = kPilotStream;
  return p;
}

std::string covariance_table(const std::vector<const CovarianceReport*>& reports) {
  TextTable t({"method", "invariant", "i", "j", "C~_ij", "C_ij"});
  for (const auto* r : reports) {
    for (Eigen::Index i = 0; i < r->c.rows(); ++i) {
      for (Eigen::Index j = i; j < r->c.cols(); ++j) {
        t.add_row({r->method, r->invariant, std::to_string(i + 1), std::to_string(j + 1),
                   cell(r->c_tilde(i, j), 12), cell(r->c(i, j), 12)});
      }
    }
  }
  return t.str();
}

}  // namespace

CovarianceReport theoretical_covariance(const ExperimentConfig& cfg, bool allow_pilot) {
  if (!cfg.tracer) throw ConfigError("this command needs a 'tracer' section");
  const DrivingModel& model = *cfg.model;
  const auto& w = cfg.tracer->functions;
  const Mat& sigma = cfg.tracer->noise_covariance;
  if (model.is_levy() && model.period()) {
    return covariance_series(model, w, sigma, {cfg.run.convention, cfg.run.eps_zero});
  }
  if (model.period()) {
    const auto hist = pilot_histogram(model, pilot_options(cfg));
    QuadratureCovarianceOptions q;
    q.grid_per_axis = cfg.run.quadrature_grid;
    return covariance_quadrature(model, w, sigma, hist, q);
  }
  if (!allow_pilot) {
    throw ConfigError(
        "no theoretical covariance for a model without a period: run "
        "'tracer simulate --pilot' to estimate it from a long pilot path, or pass --pilot");
  }
  return covariance_pilot(model, w, sigma, pilot_options(cfg));
}

int cmd_check(const ExperimentConfig& cfg, const CommandOptions& opts) {
  Output out(cfg, "check", opts);
  const auto c = run_checks(cfg);
  out.json_file("check_report.json", c.report);
  out.text("check_report.txt", c.text);
  out.finish();
  return c.hard_pass ? kExitOk : kExitFailed;
}

int cmd_covariance(const ExperimentConfig& cfg, const CommandOptions& opts) {
  if (!cfg.tracer) throw ConfigError("covariance needs a 'tracer' section");
  Output out(cfg, "covariance", opts);
  const DrivingModel& model = *cfg.model;
  const auto checks = run_checks(cfg);
  if (!checks.hard_pass && !opts.force) {
    out.text("covariance.txt", checks.text +
                                   "covariance skipped: hard checks failed (use --force)\n");
    out.finish();
    return kExitFailed;
  }
  const auto& w = cfg.tracer->functions;
  const Mat& sigma = cfg.tracer->noise_covariance;
  QuadratureCovarianceOptions q;
  q.grid_per_axis = cfg.run.quadrature_grid;

  json summary;
  std::string body = header(cfg, "limiting covariance");
  if (model.is_levy() && model.period()) {
    const auto series = covariance_series(model, w, sigma, {cfg.run.convention, cfg.run.eps_zero});
    const auto quad = covariance_quadrature(model, w, sigma, q);
    const double gap = (series.c_tilde - quad.c_tilde).cwiseAbs().maxCoeff();
    out.json_file("covariance_series.json", to_json(series));
    out.json_file("covariance_quadrature.json", to_json(quad));
    summary["c"] = to_json(series.c);
    summary["max_discrepancy"] = gap;
    summary["valid"] = series.valid;
    body += covariance_table({&series, &quad});
    body += "max |series - quadrature| = " + cell(gap, 3) + "\n";
    for (const auto& n : series.notes) body += "note: " + n + "\n";
  } else {
    const auto rep = theoretical_covariance(cfg, opts.pilot);
    out.json_file(rep.method == "monte-carlo" ? "covariance_pilot.json"
                                              : "covariance_quadrature.json",
                  to_json(rep));
    summary["c"] = to_json(rep.c);
    summary["max_discrepancy"] = nullptr;
    summary["valid"] = rep.valid;
    body += covariance_table({&rep});
    body += "note: series form needs a periodic Levy model\n";
  }
  summary["forced"] = !checks.hard_pass;
  out.json_file("covariance_summary.json", summary);
  out.text("covariance.txt", body);
  out.finish();
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& cfg, const CommandOptions& opts) {
  if (!cfg.run.horizon) throw ConfigError("simulate needs run.horizon");
  const TracerModel tm = cfg.tracer_model();
  Output out(cfg, "simulate", opts);
  const double horizon = *cfg.run.horizon;
  const double dt = cfg.run.dt;
  (void)grid_steps(dt, horizon);
  const std::size_t dump = std::min(cfg.run.dump_paths, cfg.run.n_paths);
  const int dbar = cfg.model->dimension();
  const int d = tm.dimension();
  const bool periodic = cfg.model->period().has_value();

  struct PathOut {
    Vec f, x, integral;
    std::string csv;
    std::size_t jumps = 0;
    std::vector<double> hist;
  };
  const int bins = 32;
  EnsembleSpec spec{cfg.run.n_paths, cfg.seed(), cfg.run.workers, 0};
  auto paths = run_ensemble(spec, [&](std::size_t i, Rng& rng) {
    const TracerPath p = simulate_tracer(tm, dt, horizon, rng);
    PathOut o;
    const std::size_t last = p.driving.steps;
    const auto fs = p.driving.state(last);
    o.f = Eigen::Map<const Vec>(fs.data(), dbar);
    const auto xs = p.x_at(last);
    o.x = Eigen::Map<const Vec>(xs.data(), d);
    const auto is = p.integral_at(last);
    o.integral = Eigen::Map<const Vec>(is.data(), d);
    o.jumps = p.driving.jumps.size();
    if (periodic && dbar <= 2) o.hist = occupation_histogram(p.driving, bins).counts();
    if (i < dump) {
      std::vector<std::string> cols{"t"};
      for (int k = 1; k <= dbar; ++k) cols.push_back("F_" + std::to_string(k));
      if (periodic) {
        for (int k = 1; k <= dbar; ++k) cols.push_back("Ftorus_" + std::to_string(k));
      }
      for (int k = 1; k <= d; ++k) cols.push_back("X_" + std::to_string(k));
      for (int k = 1; k <= d; ++k) cols.push_back("I_" + std::to_string(k));
      CsvTable t(cols);
      for (std::size_t m = 0; m <= last; ++m) {
        std::vector<double> row{p.driving.time(m)};
        for (double v : p.driving.state(m)) row.push_back(v);
        if (periodic) {
          for (double v : p.driving.torus_state(m)) row.push_back(v);
        }
        for (double v : p.x_at(m)) row.push_back(v);
        for (double v : p.integral_at(m)) row.push_back(v);
        t.add_row(row);
      }
      o.csv = t.str();
    }
    return o;
  });

  for (std::size_t i = 0; i < dump; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "paths/path_%04zu.csv", i);
    if (cfg.output.wants("csv")) {
      write_file(fs::path(cfg.output.dir) / name, "# config_hash=" + cfg.hash + "\n" + paths[i].csv);
    }
  }

  json summary;
  summary["n_paths"] = cfg.run.n_paths;
  summary["horizon"] = horizon;
  summary["dt"] = dt;
  std::size_t jumps = 0;
  for (const auto& p : paths) jumps += p.jumps;
  summary["mean_jump_count"] = static_cast<double>(jumps) / static_cast<double>(paths.size());
  std::string body = header(cfg, "simulation");
  TextTable t({"quantity", "component", "mean", "std"});
  auto add_stats = [&](const char* key, auto member) {
    std::vector<Vec> xs;
    for (const auto& p : paths) xs.push_back(p.*member);
    if (xs.size() < 8) {
      summary[key] = nullptr;
      return;
    }
    const auto s = summarize(xs);
    summary[key] = to_json(s);
    for (Eigen::Index i = 0; i < s.mean.size(); ++i) {
      t.add_row({key, std::to_string(i + 1), cell(s.mean(i)), cell(std::sqrt(s.covariance(i, i)))});
    }
  };
  add_stats("terminal_F", &PathOut::f);
  add_stats("terminal_X", &PathOut::x);
  add_stats("terminal_I", &PathOut::integral);
  body += t.str();
  if (paths.size() < 8) body += "note: fewer than 8 paths, no ensemble statistics\n";

  if (periodic && dbar <= 2) {
    OccupationHistogram pooled(*cfg.model->period(), bins);
    std::vector<std::string> cols;
    for (int k = 1; k <= dbar; ++k) cols.push_back("center_" + std::to_string(k));
    cols.push_back("mass");
    CsvTable h(cols);
    std::vector<double> total(pooled.cells(), 0.0);
    double mass = 0.0;
    for (const auto& p : paths) {
      for (std::size_t c = 0; c < total.size(); ++c) {
        total[c] += p.hist[c];
        mass += p.hist[c];
      }
    }
    double tv = 0.0;
    for (std::size_t c = 0; c < total.size(); ++c) {
      std::vector<double> row;
      const Vec center = pooled.cell_center(c);
      for (Eigen::Index k = 0; k < center.size(); ++k) row.push_back(center(k));
      const double pm = mass > 0.0 ? total[c] / mass : 0.0;
      row.push_back(pm);
      h.add_row(row);
      tv += std::abs(pm - 1.0 / static_cast<double>(total.size()));
    }
    out.csv_file("histogram.csv", h);
    summary["occupation_tv_to_uniform"] = 0.5 * tv;
    body += "occupation TV to uniform (" + std::to_string(bins) + " bins/axis): " +
            cell(0.5 * tv, 4) + "\n";
  }

  if (opts.pilot) {
    const auto rep = theoretical_covariance(cfg, true);
    out.json_file("pilot_covariance.json", to_json(rep));
    body += covariance_table({&rep});
  }

  out.json_file("simulate_summary.json", summary);
  out.text("simulate.txt", body);
  out.finish({{"n_paths", cfg.run.n_paths}, {"dumped_paths", dump}});
  return kExitOk;
}

int cmd_lln(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const TracerModel tm = cfg.tracer_model();
  Output out(cfg, "lln", opts);
  LlnOptions o;
  o.n_ladder = cfg.run.n_ladder;
  o.t = cfg.run.t;
  o.n_paths = cfg.run.n_paths;
  o.dt = cfg.run.dt;
  o.seed = cfg.seed();
  o.workers = cfg.run.workers;
  const auto rep = lln_experiment(tm, o);

  CsvTable csv({"n", "mean_deviation", "stderr"});
  TextTable t({"n", "mean |X_nt/n - D t|", "stderr", "max"});
  for (const auto& r : rep.rungs) {
    csv.add_row(std::vector<double>{r.n, r.mean_deviation, r.standard_error});
    t.add_row({cell(r.n), cell(r.mean_deviation), cell(r.standard_error), cell(r.max_deviation)});
  }
  out.csv_file("lln.csv", csv);
  out.json_file("lln_summary.json", to_json(rep));
  std::string body = header(cfg, "law of large numbers") + t.str();
  body += "log-log slope = " + cell(rep.slope, 4) + ", strictly decreasing: " +
          (rep.strictly_decreasing ? "yes" : "no") + "\n";
  out.text("lln.txt", body);
  out.finish({{"n_paths", cfg.run.n_paths}});
  return rep.strictly_decreasing ? kExitOk : kExitFailed;
}

int cmd_clt(const ExperimentConfig& cfg, const CommandOptions& opts) {
  const TracerModel tm = cfg.tracer_model();
  Output out(cfg, "clt", opts);
  const auto theory = theoretical_covariance(cfg, opts.pilot);
  CltOptions o;
  o.n = cfg.run.n;
  o.t_grid = cfg.run.t_grid;
  o.n_paths = cfg.run.n_paths;
  o.dt = cfg.run.dt;
  o.seed = cfg.seed();
  o.workers = cfg.run.workers;
  o.tol_cov = cfg.run.tol_cov;
  o.p_min = cfg.run.p_min;
  const auto rep = clt_experiment(tm, theory.c, o);

  CsvTable csv({"t", "component", "empirical_var", "theoretical_var", "ks_p"});
  TextTable t({"t", "i", "empirical var", "t C_ii", "rel err", "KS p", "3SE"});
  for (const auto& row : rep.rows) {
    for (Eigen::Index i = 0; i < row.theoretical.rows(); ++i) {
      const double p = row.stats.ks[static_cast<std::size_t>(i)].p_value;
      csv.add_row(std::vector<double>{row.t, static_cast<double>(i + 1),
                                      row.stats.covariance(i, i), row.theoretical(i, i), p});
      t.add_row({cell(row.t), std::to_string(i + 1), cell(row.stats.covariance(i, i)),
                 cell(row.theoretical(i, i)), cell(row.relative_error, 3), cell(p, 3),
                 row.within_3se ? "yes" : "no"});
    }
  }
  out.csv_file("clt.csv", csv);
  json summary = to_json(rep);
  summary["theory"] = to_json(theory);
  summary["tol_cov"] = o.tol_cov;
  summary["p_min"] = o.p_min;
  out.json_file("clt_summary.json", summary);
  std::string body = header(cfg, "central limit theorem, n = " + cell(o.n)) + t.str();
  body += "jump cap: max " + cell(rep.jump_cap.max_rescaled_increment, 4) + " <= bound " +
          cell(rep.jump_cap.bound, 4) + ": " + yes_no(rep.jump_cap.pass) + "\n";
  if (rep.rows.size() >= 2) {
    body += "Var/t spread across t = " + cell(rep.linearity_spread, 3) + "\n";
  }
  body += std::string("verdict: ") + (rep.pass ? "pass" : "FAIL") + "\n";
  out.text("clt.txt", body);
  out.finish({{"n_paths", cfg.run.n_paths}});
  return rep.pass ? kExitOk : kExitFailed;
}

int run_command(const std::string& name, const ExperimentConfig& cfg,
                const CommandOptions& opts, std::ostream& err) {
  try {
    if (name == "check") return cmd_check(cfg, opts);
    if (name == "covariance") return cmd_covariance(cfg, opts);
    if (name == "simulate") return cmd_simulate(cfg, opts);
    if (name == "lln") return cmd_lln(cfg, opts);
    if (name == "clt") return cmd_clt(cfg, opts);
    err << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace tracer
