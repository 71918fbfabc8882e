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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tracer/commands.hpp"
#include "tracer/config.hpp"
#include "tracer/ergodic.hpp"
#include "tracer/stats.hpp"

using namespace tracer;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kConfigs = TRACER_CONFIG_DIR;
const double kC = 2.0 * (1.0 - std::cos(1.0));

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path work_dir() {
  static const fs::path root = [] {
    const fs::path p = fs::temp_directory_path() / "tracer_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

ExperimentConfig shipped(const std::string& name, const std::string& out_tag = {},
                         std::optional<unsigned> workers = {}) {
  Overrides ov;
  ov.out_dir = (work_dir() / (out_tag.empty() ? name : out_tag)).string();
  ov.workers = workers;
  return load_config(kConfigs / (name + ".json"), ov);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> files_in(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

int run_cmd(const std::string& cmd, const ExperimentConfig& cfg) {
  CommandOptions o;
  return run_command(cmd, cfg, o, std::cerr);
}

PeriodicFunction sin1(const Vec& tau) { return PeriodicFunction::sine(tau, 0); }

// ---------------------------------------------------------------------------

Outcome paper_value() {
  const auto cfg = shipped("rm3");
  const auto& w = cfg.tracer->functions;
  const Clock clock;
  const auto series = covariance_series(*cfg.model, w, Mat::Zero(1, 1));
  QuadratureCovarianceOptions q;
  q.grid_per_axis = 512;
  const auto quad = covariance_quadrature(*cfg.model, w, Mat::Zero(1, 1), q);
  const double secs = clock.seconds();
  const double e_series = std::abs(series.c(0, 0) - kC);
  const double e_quad = std::abs(quad.c(0, 0) - series.c(0, 0));
  return {e_series <= 1e-12 && e_quad <= 1e-8 && secs < 1.0,
          fmt("series C = %.13f (|err| %.1e <= 1e-12), quadrature gap %.1e <= 1e-8, %.3f s < 1 s",
              series.c(0, 0), e_series, e_quad, secs)};
}

Outcome clt_rm3() {
  const auto cfg = shipped("rm3", "clt_rm3_w1", 1u);
  const Clock clock;
  const int code = run_cmd("clt", cfg);
  const double secs = clock.seconds();
  if (code != kExitOk && code != kExitFailed) return {false, fmt("clt command exit %d", code)};
  const auto s = json::parse(slurp(fs::path(cfg.output.dir) / "clt_summary.json"));
  const auto& row = s["rows"][0];
  const double var = row["conditional"]["covariance"][0][0].get<double>();
  const double se = row["conditional"]["covariance_stderr"][0][0].get<double>();
  const double rel = std::abs(var - kC) / kC;
  const double p = row["min_ks_p"].get<double>();
  return {rel <= 0.10 && p > 0.01 && secs < 300.0,
          fmt("n=2000 t=1 400 paths: Var %.6f vs %.6f, rel err %.3f (tol 0.10), SE %.4f (%.1f SE), "
              "KS p %.3f (> 0.01), %.1f s single-core",
              var, kC, rel, se, std::abs(var - kC) / se, p, secs)};
}

Outcome dual_formula() {
  const Vec tau = Vec::Constant(1, 2 * std::numbers::pi);
  const std::vector<std::pair<std::string, PeriodicFunction>> ws = {
      {"sin", sin1(tau)},
      {"cos", PeriodicFunction::cosine(tau, 0)},
      {"sin+cos2/2", sin1(tau) + PeriodicFunction::cosine(tau, 0, 2, 0.5)}};
  double worst_atoms_bm = 0.0, worst_stable = 0.0;
  for (const char* name : {"rm3", "brownian", "stable"}) {
    const auto cfg = shipped(name);
    for (const auto& [label, w] : ws) {
      const auto s = covariance_series(*cfg.model, {w}, Mat::Zero(1, 1));
      const auto q = covariance_quadrature(*cfg.model, {w}, Mat::Zero(1, 1));
      const double gap = std::abs(s.c(0, 0) - q.c(0, 0));
      if (std::string(name) == "stable") {
        worst_stable = std::max(worst_stable, gap);
      } else {
        worst_atoms_bm = std::max(worst_atoms_bm, gap);
      }
    }
  }
  return {worst_atoms_bm <= 1e-8 && worst_stable <= 1e-6,
          fmt("max |series - quadrature|: atoms/Brownian %.1e (<= 1e-8), stable %.1e (<= 1e-6)",
              worst_atoms_bm, worst_stable)};
}

Outcome brownian_cross_check() {
  const auto cfg = shipped("brownian");
  const auto& w = cfg.tracer->functions;
  const auto s = covariance_series(*cfg.model, w, Mat::Zero(1, 1));
  const auto q = covariance_quadrature(*cfg.model, w, Mat::Zero(1, 1));
  CltOptions o;
  o.n = 2000.0;
  o.t_grid = {1.0};
  o.n_paths = 400;
  o.dt = cfg.run.dt;
  o.seed = cfg.seed();
  o.workers = 0;
  const auto r = clt_experiment(cfg.tracer_model(), s.c, o);
  const double var = r.rows[0].stats.covariance(0, 0);
  const double rel = std::abs(var - 0.5) / 0.5;
  const bool exact = s.c_tilde(0, 0) == 0.5 && std::abs(q.c_tilde(0, 0) - 0.5) <= 1e-15;
  return {exact && rel <= 0.10,
          fmt("series C~ = %.17g, quadrature C~ = %.17g, Monte Carlo Var %.4f (rel err %.3f <= 0.10)",
              s.c_tilde(0, 0), q.c_tilde(0, 0), var, rel)};
}

Outcome lln_rm3() {
  const auto cfg = shipped("rm3", "lln_rm3_w1", 1u);
  const int code = run_cmd("lln", cfg);
  if (code != kExitOk && code != kExitFailed) return {false, fmt("lln command exit %d", code)};
  const auto s = json::parse(slurp(fs::path(cfg.output.dir) / "lln_summary.json"));
  const auto& rungs = s["rungs"];
  std::string devs;
  for (const auto& r : rungs) devs += fmt("%.4f ", r["mean_deviation"].get<double>());
  const double last = rungs.back()["mean_deviation"].get<double>();
  const double slope = s["slope"].get<double>();
  const bool dec = s["strictly_decreasing"].get<bool>();
  return {dec && last < 0.05 && slope >= -0.7 && slope <= -0.3 &&
              rungs.size() == 3 && rungs[0]["n"] == 250 && rungs[2]["n"] == 4000,
          fmt("mean |X_n/n| over n = 250/1000/4000: %sdecreasing=%s, final %.4f < 0.05, slope %.3f in "
              "[-0.7, -0.3]",
              devs.c_str(), dec ? "yes" : "no", last, slope)};
}

Outcome pure_drift_identity() {
  const auto cfg = shipped("pure_drift");
  const TracerModel tm = cfg.tracer_model();
  const Vec tau = *cfg.model->period();
  Rng rng(cfg.seed(), 0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double l0 = rng.uniform() * tau(0) * 3.0 - tau(0);
    const double horizon = 10.0 * (i + 1);
    const auto p = tracer_path(tm, simulate_path(*cfg.model, Vec::Constant(1, l0), 1e-3, horizon, rng), rng);
    const double expected = std::sin(l0 + horizon) - std::sin(l0);
    for (std::size_t m = 0; m <= p.driving.steps; m += 1000) {
      const double t = p.driving.time(m);
      worst = std::max(worst, std::abs(p.integral[m] - (std::sin(l0 + t) - std::sin(l0))));
    }
    worst = std::max(worst, std::abs(p.integral.back() - expected));
  }
  return {worst <= 1e-6, fmt("10 starts, T <= 100, dt = 1e-3: max |I_T - (sin(L0+T) - sin L0)| = %.1e <= 1e-6", worst)};
}

Outcome dynkin_all() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"rm3", "brownian", "stable", "pure_drift", "constant_w", "feller", "irrational"}) {
    const auto cfg = shipped(name);
    const auto r = dynkin_check(cfg.tracer_model(), 1.0, 10000, cfg.run.dt, cfg.seed(), 0);
    pass &= r.max_abs_z < 4.0;
    detail += fmt("%s |z|=%.2f ", name, r.max_abs_z);
  }
  return {pass, detail + "(all < 4, 10^4 paths, T=1)"};
}

Outcome condition_checkers() {
  const auto rm3 = shipped("rm3");
  const auto e = check_ergodicity_condition(*rm3.model, 50);
  // q = 2(1 - cos(kappa xi)) with kappa = 1, tau = 2 pi built independently of the config
  DrivingModel::Spec spec;
  spec.dimension = 1;
  spec.drift = {ScalarField(0.0)};
  spec.diffusion = {ScalarField(0.0)};
  spec.period = Vec::Constant(1, 2 * std::numbers::pi);
  Vec kappa = Vec::Constant(1, 1.0);
  spec.jumps = AtomicJumps{{{kappa, 1.0}, {Vec(-kappa), 1.0}}};
  const DrivingModel lattice(std::move(spec));
  const auto e2 = check_ergodicity_condition(lattice, 50);
  const auto pd = check_ergodicity_condition(*shipped("pure_drift").model, 50);
  const bool pd_ok = pd.verdict == ErgodicityCheck::Verdict::kFail && pd.k0 && *pd.k0 == LatticePoint{1};

  bool sector_ok = true;
  std::string sector;
  std::vector<Vec> xi;
  for (int k = 1; k <= 8; ++k) {
    xi.push_back(Vec::Constant(1, k));
    xi.push_back(Vec::Constant(1, -k));
  }
  for (const char* name : {"rm3", "brownian", "stable", "constant_w", "irrational", "feller"}) {
    const auto cfg = shipped(name);
    if (!cfg.model->is_symmetric()) continue;
    const auto s = check_sector_condition(*cfg.model, cfg.model->probe_points(), xi);
    sector_ok &= s.pass && s.c == 0.0;
    sector += fmt("%s c=%g ", name, s.c);
  }
  const bool pass = e.verdict == ErgodicityCheck::Verdict::kPass &&
                    e2.verdict == ErgodicityCheck::Verdict::kPass && pd_ok && sector_ok;
  return {pass, fmt("rm3 %s, kappa=1 %s, pure drift %s k0=%s; sector: %s", to_string(e.verdict),
                    to_string(e2.verdict), to_string(pd.verdict),
                    pd.k0 ? std::to_string(pd.k0->front()).c_str() : "none", sector.c_str())};
}

Outcome torus_invariance() {
  const auto bm = shipped("brownian");
  Rng rng(bm.seed(), 0);
  const auto path = simulate_path(*bm.model, Vec::Zero(1), bm.run.dt, 5000.0, rng);
  const double tv = occupation_histogram(path, 32).tv_to_uniform();
  const auto rm3 = shipped("rm3");
  TvDecayOptions o;
  o.seed = rm3.seed();
  o.workers = 0;
  const auto r = tv_decay_estimate(*rm3.model, o);
  return {tv < 0.05 && r.non_decaying,
          fmt("Brownian T=5000 32 bins TV %.4f < 0.05; rm3 TV at t=%g is %.3f (noise %.3f), "
              "non-decaying flag %s",
              tv, r.times.back(), r.tv.back(), r.noise_floor.back(), r.non_decaying ? "set" : "NOT set")};
}

Outcome determinism() {
  // repeat the criterion 2 and 5 runs with other worker counts
  std::string detail;
  bool pass = true;
  for (const auto& [cmd, tag] : {std::pair<std::string, std::string>{"clt", "clt_rm3"},
                                 std::pair<std::string, std::string>{"lln", "lln_rm3"}}) {
    const auto again = shipped("rm3", tag + "_w1_again", 1u);
    const auto wide = shipped("rm3", tag + "_w4", 4u);
    run_cmd(cmd, again);
    run_cmd(cmd, wide);
    const auto a = files_in(work_dir() / (tag + "_w1"));
    const auto b = files_in(work_dir() / (tag + "_w1_again"));
    const auto c = files_in(work_dir() / (tag + "_w4"));
    const bool same = !a.empty() && a == b && a == c;
    pass &= same;
    detail += fmt("%s: %zu files %s; ", cmd.c_str(), a.size(), same ? "identical" : "DIFFER");
  }
  return {pass, detail + "workers 1/1/4"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"paper value C = 2(1 - cos 1)", paper_value},
      {"Monte Carlo CLT, rm3", clt_rm3},
      {"series/quadrature equivalence", dual_formula},
      {"Brownian cross-check", brownian_cross_check},
      {"LLN ladder, rm3", lln_rm3},
      {"pure-drift identity", pure_drift_identity},
      {"Dynkin martingale", dynkin_all},
      {"condition checkers", condition_checkers},
      {"torus invariance and TV decay", torus_invariance},
      {"determinism across workers", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const Clock clock;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %zu: %s  %s  [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), clock.seconds());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
