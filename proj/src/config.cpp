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

#include "tracer/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tracer/error.hpp"

namespace tracer {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
      std::string known;
      for (const char* k : keys) known += (known.empty() ? "" : ", ") + std::string(k);
      fail(where, "unknown key '" + key + "' (expected one of: " + known + ")");
    }
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& where) {
  const double v = number(j, where);
  if (!(v > 0.0)) fail(where, "must be positive");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

Vec vector_of(const json& j, const std::string& where, Eigen::Index size) {
  if (j.is_number() && size == 1) return Vec::Constant(1, number(j, where));
  if (!j.is_array()) fail(where, "expected an array of numbers");
  if (static_cast<Eigen::Index>(j.size()) != size) {
    fail(where, "expected " + std::to_string(size) + " entries");
  }
  Vec v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    v(i) = number(j[static_cast<std::size_t>(i)], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

/// d x d matrix from nested arrays, or a number meaning value * I.
Mat matrix_of(const json& j, const std::string& where, Eigen::Index d) {
  if (j.is_number()) return number(j, where) * Mat::Identity(d, d);
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) {
    fail(where, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  }
  Mat m(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    m.row(i) = vector_of(j[static_cast<std::size_t>(i)], where, d).transpose();
  }
  return m;
}

std::vector<double> list_of(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

PeriodicFunction parse_function(const json& j, const Vec& period, const std::string& where) {
  const int dim = static_cast<int>(period.size());
  if (j.is_number()) return PeriodicFunction::constant(period, number(j, where));
  if (!j.is_object() || !j.contains("kind")) fail(where, "expected a number or {\"kind\": ...}");
  const std::string kind = text(j["kind"], where + ".kind");
  try {
    if (kind == "const") {
      allow_keys(j, where, {"kind", "value"});
      if (!j.contains("value")) fail(where, "const needs 'value'");
      return PeriodicFunction::constant(period, number(j["value"], where + ".value"));
    }
    if (kind == "sin" || kind == "cos") {
      allow_keys(j, where, {"kind", "axis", "mode", "amplitude"});
      const int axis = j.contains("axis") ? integer(j["axis"], where + ".axis") : 0;
      const int mode = j.contains("mode") ? integer(j["mode"], where + ".mode") : 1;
      const double amp = j.contains("amplitude") ? number(j["amplitude"], where + ".amplitude") : 1.0;
      if (axis < 0 || axis >= dim) fail(where, "axis out of range");
      return kind == "sin" ? PeriodicFunction::sine(period, axis, mode, amp)
                           : PeriodicFunction::cosine(period, axis, mode, amp);
    }
    if (kind == "coefficients") {
      allow_keys(j, where, {"kind", "terms"});
      if (!j.contains("terms") || !j["terms"].is_array()) fail(where, "needs a 'terms' array");
      std::vector<FourierTerm> terms;
      for (std::size_t i = 0; i < j["terms"].size(); ++i) {
        const json& t = j["terms"][i];
        const std::string tw = where + ".terms[" + std::to_string(i) + "]";
        allow_keys(t, tw, {"k", "re", "im"});
        if (!t.contains("k") || !t["k"].is_array() || static_cast<int>(t["k"].size()) != dim) {
          fail(tw, "'k' must list one integer per axis");
        }
        LatticePoint k;
        for (const auto& v : t["k"]) k.push_back(integer(v, tw + ".k"));
        const double re = t.contains("re") ? number(t["re"], tw + ".re") : 0.0;
        const double im = t.contains("im") ? number(t["im"], tw + ".im") : 0.0;
        terms.push_back({k, Complex(re, im)});
      }
      return PeriodicFunction(period, std::move(terms));
    }
    if (kind == "sum") {
      allow_keys(j, where, {"kind", "terms"});
      if (!j.contains("terms") || !j["terms"].is_array() || j["terms"].empty()) {
        fail(where, "needs a nonempty 'terms' array");
      }
      PeriodicFunction acc = parse_function(j["terms"][0], period, where + ".terms[0]");
      for (std::size_t i = 1; i < j["terms"].size(); ++i) {
        acc = acc + parse_function(j["terms"][i], period, where + ".terms[" + std::to_string(i) + "]");
      }
      return acc;
    }
  } catch (const ModelError& e) {
    fail(where, e.what());
  }
  fail(where, "unknown function kind '" + kind + "' (const, sin, cos, coefficients, sum)");
}

ScalarField parse_field(const json& j, const std::optional<Vec>& period, const std::string& where) {
  if (j.is_number()) return ScalarField(number(j, where));
  if (!period) fail(where, "non-constant coefficients need a model period");
  PeriodicFunction f = parse_function(j, *period, where);
  return ScalarField(std::move(f));
}

std::optional<Vec> parse_period(const json& j, int dim, const std::string& where) {
  Vec p(dim);
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != dim) fail(where, "expected one period per axis");
    for (int i = 0; i < dim; ++i) {
      try {
        p(i) = parse_length(j[static_cast<std::size_t>(i)]);
      } catch (const ConfigError& e) {
        fail(where, e.what());
      }
    }
  } else {
    try {
      p.setConstant(parse_length(j));
    } catch (const ConfigError& e) {
      fail(where, e.what());
    }
  }
  for (int i = 0; i < dim; ++i) {
    if (!(p(i) > 0.0)) fail(where, "periods must be positive");
  }
  return p;
}

JumpLaw parse_law(const json& j, int dim, const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) fail(where, "expected {\"kind\": ...}");
  const std::string kind = text(j["kind"], where + ".kind");
  if (kind == "gaussian_mixture") {
    allow_keys(j, where, {"kind", "components"});
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty()) {
      fail(where, "needs a nonempty 'components' array");
    }
    GaussianMixtureLaw law;
    for (std::size_t i = 0; i < j["components"].size(); ++i) {
      const json& c = j["components"][i];
      const std::string cw = where + ".components[" + std::to_string(i) + "]";
      allow_keys(c, cw, {"weight", "mean", "stddev"});
      GaussianComponent g;
      g.weight = c.contains("weight") ? positive(c["weight"], cw + ".weight") : 1.0;
      g.mean = c.contains("mean") ? vector_of(c["mean"], cw + ".mean", dim) : Vec::Zero(dim);
      if (!c.contains("stddev")) fail(cw, "needs 'stddev'");
      g.stddev = c["stddev"].is_number() ? Vec::Constant(dim, positive(c["stddev"], cw + ".stddev"))
                                         : vector_of(c["stddev"], cw + ".stddev", dim);
      law.components.push_back(std::move(g));
    }
    return law;
  }
  if (kind == "uniform_box") {
    allow_keys(j, where, {"kind", "lo", "hi"});
    if (!j.contains("lo") || !j.contains("hi")) fail(where, "needs 'lo' and 'hi'");
    return UniformBoxLaw{vector_of(j["lo"], where + ".lo", dim), vector_of(j["hi"], where + ".hi", dim)};
  }
  fail(where, "unknown law kind '" + kind + "' (gaussian_mixture, uniform_box)");
}

JumpMeasure parse_jumps(const json& j, int dim, const std::optional<Vec>& period,
                        const std::string& where) {
  if (!j.is_object() || !j.contains("kind")) fail(where, "expected {\"kind\": ...}");
  const std::string kind = text(j["kind"], where + ".kind");
  if (kind == "none") {
    allow_keys(j, where, {"kind"});
    return NoJumps{};
  }
  if (kind == "atoms") {
    allow_keys(j, where, {"kind", "atoms"});
    if (!j.contains("atoms") || !j["atoms"].is_array()) fail(where, "needs an 'atoms' array");
    AtomicJumps a;
    for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
      const json& at = j["atoms"][i];
      const std::string aw = where + ".atoms[" + std::to_string(i) + "]";
      allow_keys(at, aw, {"location", "rate"});
      if (!at.contains("location") || !at.contains("rate")) fail(aw, "needs 'location' and 'rate'");
      a.atoms.push_back({vector_of(at["location"], aw + ".location", dim),
                         number(at["rate"], aw + ".rate")});
    }
    return a;
  }
  if (kind == "density") {
    allow_keys(j, where, {"kind", "rate", "law"});
    if (!j.contains("rate") || !j.contains("law")) fail(where, "needs 'rate' and 'law'");
    return DensityJumps{parse_field(j["rate"], period, where + ".rate"),
                        parse_law(j["law"], dim, where + ".law")};
  }
  if (kind == "stable") {
    allow_keys(j, where, {"kind", "alpha", "gamma"});
    if (!j.contains("alpha")) fail(where, "needs 'alpha'");
    return StableJumps{parse_field(j["alpha"], period, where + ".alpha"),
                       j.contains("gamma") ? parse_field(j["gamma"], period, where + ".gamma")
                                           : ScalarField(1.0)};
  }
  fail(where, "unknown jump kind '" + kind + "' (none, atoms, density, stable)");
}

std::shared_ptr<const DrivingModel> parse_model(const json& j, const std::string& name) {
  const std::string where = "model";
  allow_keys(j, where, {"dimension", "period", "drift", "diffusion", "jumps"});
  const int dim = j.contains("dimension") ? integer(j["dimension"], "model.dimension") : 1;
  if (dim < 1 || dim > 8) fail("model.dimension", "must lie in 1..8");
  DrivingModel::Spec spec;
  spec.dimension = dim;
  spec.name = name;
  if (j.contains("period")) spec.period = parse_period(j["period"], dim, "model.period");

  spec.drift.assign(static_cast<std::size_t>(dim), ScalarField(0.0));
  if (j.contains("drift")) {
    const json& b = j["drift"];
    if (b.is_array()) {
      if (static_cast<int>(b.size()) != dim) fail("model.drift", "expected one entry per axis");
      for (int i = 0; i < dim; ++i) {
        spec.drift[static_cast<std::size_t>(i)] =
            parse_field(b[static_cast<std::size_t>(i)], spec.period,
                        "model.drift[" + std::to_string(i) + "]");
      }
    } else if (dim == 1) {
      spec.drift[0] = parse_field(b, spec.period, "model.drift");
    } else {
      fail("model.drift", "expected an array");
    }
  }

  spec.diffusion.assign(static_cast<std::size_t>(dim * dim), ScalarField(0.0));
  if (j.contains("diffusion")) {
    const json& c = j["diffusion"];
    if (c.is_number()) {
      for (int i = 0; i < dim; ++i) {
        spec.diffusion[static_cast<std::size_t>(i * dim + i)] = number(c, "model.diffusion");
      }
    } else if (c.is_array() && static_cast<int>(c.size()) == dim) {
      for (int i = 0; i < dim; ++i) {
        const json& row = c[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) {
          fail("model.diffusion", "expected a square matrix");
        }
        for (int k = 0; k < dim; ++k) {
          spec.diffusion[static_cast<std::size_t>(i * dim + k)] = parse_field(
              row[static_cast<std::size_t>(k)], spec.period,
              "model.diffusion[" + std::to_string(i) + "][" + std::to_string(k) + "]");
        }
      }
    } else {
      fail("model.diffusion", "expected a number or a square matrix");
    }
  }
  if (j.contains("jumps")) spec.jumps = parse_jumps(j["jumps"], dim, spec.period, "model.jumps");

  try {
    return std::make_shared<const DrivingModel>(std::move(spec));
  } catch (const ModelError& e) {
    fail("model", e.what());
  } catch (const UnsupportedError& e) {
    fail("model", e.what());
  }
}

TracerSpec parse_tracer(const json& j, const DrivingModel& model) {
  const std::string where = "tracer";
  allow_keys(j, where,
             {"functions", "period", "noise_covariance", "drift_law", "x0", "initial"});
  const int dim = model.dimension();
  std::optional<Vec> period = model.period();
  if (j.contains("period")) {
    const auto p = parse_period(j["period"], dim, "tracer.period");
    if (period && (*p - *period).cwiseAbs().maxCoeff() > 1e-12 * period->cwiseAbs().maxCoeff()) {
      fail("tracer.period", "differs from the model period");
    }
    period = p;
  }
  if (!period) fail(where, "test functions need a period (model.period or tracer.period)");
  if (!j.contains("functions") || !j["functions"].is_array() || j["functions"].empty()) {
    fail(where, "needs a nonempty 'functions' array");
  }
  TracerSpec t;
  for (std::size_t i = 0; i < j["functions"].size(); ++i) {
    t.functions.push_back(
        parse_function(j["functions"][i], *period, "tracer.functions[" + std::to_string(i) + "]"));
  }
  const auto d = static_cast<Eigen::Index>(t.functions.size());
  t.noise_covariance = j.contains("noise_covariance")
                           ? matrix_of(j["noise_covariance"], "tracer.noise_covariance", d)
                           : Mat::Zero(d, d);
  t.x0 = j.contains("x0") ? vector_of(j["x0"], "tracer.x0", d) : Vec::Zero(d);

  t.drift_law.kind = DriftLaw::Kind::kPoint;
  t.drift_law.mean = Vec::Zero(d);
  if (j.contains("drift_law")) {
    const json& dl = j["drift_law"];
    const std::string w = "tracer.drift_law";
    allow_keys(dl, w, {"kind", "mean", "covariance", "values"});
    const std::string kind = dl.contains("kind") ? text(dl["kind"], w + ".kind") : "point";
    if (kind == "point" || kind == "normal") {
      t.drift_law.kind = kind == "point" ? DriftLaw::Kind::kPoint : DriftLaw::Kind::kNormal;
      if (dl.contains("mean")) t.drift_law.mean = vector_of(dl["mean"], w + ".mean", d);
      if (kind == "normal") {
        if (!dl.contains("covariance")) fail(w, "normal law needs 'covariance'");
        t.drift_law.covariance = matrix_of(dl["covariance"], w + ".covariance", d);
      }
    } else if (kind == "empirical") {
      t.drift_law.kind = DriftLaw::Kind::kEmpirical;
      if (!dl.contains("values") || !dl["values"].is_array() || dl["values"].empty()) {
        fail(w, "empirical law needs a nonempty 'values' array");
      }
      for (const auto& v : dl["values"]) t.drift_law.values.push_back(vector_of(v, w + ".values", d));
      t.drift_law.mean = t.drift_law.expectation();
    } else {
      fail(w, "unknown kind '" + kind + "' (point, normal, empirical)");
    }
  }

  const Eigen::Index dm = dim;
  if (j.contains("initial")) {
    const json& in = j["initial"];
    const std::string w = "tracer.initial";
    allow_keys(in, w, {"kind", "point", "covariance"});
    const std::string kind = in.contains("kind") ? text(in["kind"], w + ".kind") : "point";
    if (kind == "uniform") {
      t.initial.kind = InitialLaw::Kind::kUniformTorus;
      if (!model.period()) fail(w, "uniform initial law needs a periodic model");
    } else if (kind == "point" || kind == "normal") {
      t.initial.kind = kind == "point" ? InitialLaw::Kind::kPoint : InitialLaw::Kind::kNormal;
      t.initial.point = in.contains("point") ? vector_of(in["point"], w + ".point", dm) : Vec::Zero(dm);
      if (kind == "normal") {
        if (!in.contains("covariance")) fail(w, "normal law needs 'covariance'");
        t.initial.covariance = matrix_of(in["covariance"], w + ".covariance", dm);
      }
    } else {
      fail(w, "unknown kind '" + kind + "' (point, uniform, normal)");
    }
  } else if (model.period()) {
    t.initial.kind = InitialLaw::Kind::kUniformTorus;
  } else {
    t.initial.kind = InitialLaw::Kind::kPoint;
    t.initial.point = Vec::Zero(dm);
  }
  return t;
}

RunSpec parse_run(const json& j) {
  const std::string where = "run";
  allow_keys(j, where,
             {"n_paths", "dt", "horizon", "n", "n_ladder", "t", "t_grid", "seed", "workers",
              "k_max", "quadrature_grid", "tol_cov", "p_min", "dump_paths",
              "frequency_convention", "eps_zero", "pilot_horizon", "pilot_bins"});
  RunSpec r;
  auto count = [&](const char* key) -> std::size_t {
    const int v = integer(j[key], std::string("run.") + key);
    if (v < 0) fail(std::string("run.") + key, "must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  if (j.contains("n_paths")) {
    r.n_paths = count("n_paths");
    if (r.n_paths < 1) fail("run.n_paths", "must be at least 1");
  }
  if (j.contains("dt")) r.dt = positive(j["dt"], "run.dt");
  if (j.contains("horizon")) r.horizon = positive(j["horizon"], "run.horizon");
  if (j.contains("n")) r.n = positive(j["n"], "run.n");
  if (j.contains("n_ladder")) r.n_ladder = list_of(j["n_ladder"], "run.n_ladder");
  if (j.contains("t")) r.t = positive(j["t"], "run.t");
  if (j.contains("t_grid")) r.t_grid = list_of(j["t_grid"], "run.t_grid");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) fail("run.seed", "expected a nonnegative integer");
    r.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("workers")) r.workers = static_cast<unsigned>(count("workers"));
  if (j.contains("k_max")) {
    r.k_max = integer(j["k_max"], "run.k_max");
    if (r.k_max < 1) fail("run.k_max", "must be at least 1");
  }
  if (j.contains("quadrature_grid")) {
    r.quadrature_grid = integer(j["quadrature_grid"], "run.quadrature_grid");
    if (r.quadrature_grid < 2) fail("run.quadrature_grid", "must be at least 2");
  }
  if (j.contains("tol_cov")) r.tol_cov = positive(j["tol_cov"], "run.tol_cov");
  if (j.contains("p_min")) {
    r.p_min = number(j["p_min"], "run.p_min");
    if (r.p_min < 0.0 || r.p_min >= 1.0) fail("run.p_min", "must lie in [0, 1)");
  }
  if (j.contains("dump_paths")) r.dump_paths = count("dump_paths");
  if (j.contains("frequency_convention")) {
    const std::string c = text(j["frequency_convention"], "run.frequency_convention");
    if (c == "per_axis") {
      r.convention = FrequencyConvention::kPerAxis;
    } else if (c == "scalar_volume") {
      r.convention = FrequencyConvention::kScalarVolume;
    } else {
      fail("run.frequency_convention", "expected 'per_axis' or 'scalar_volume'");
    }
  }
  if (j.contains("eps_zero")) r.eps_zero = positive(j["eps_zero"], "run.eps_zero");
  if (j.contains("pilot_horizon")) r.pilot_horizon = positive(j["pilot_horizon"], "run.pilot_horizon");
  if (j.contains("pilot_bins")) {
    r.pilot_bins = integer(j["pilot_bins"], "run.pilot_bins");
    if (r.pilot_bins < 1) fail("run.pilot_bins", "must be at least 1");
  }
  return r;
}

OutputSpec parse_output(const json& j) {
  allow_keys(j, "output", {"dir", "formats"});
  OutputSpec o;
  if (j.contains("dir")) o.dir = text(j["dir"], "output.dir");
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) fail("output.formats", "expected an array");
    o.formats.clear();
    for (const auto& f : j["formats"]) {
      const std::string s = text(f, "output.formats");
      if (s != "json" && s != "csv" && s != "text") {
        fail("output.formats", "unknown format '" + s + "' (json, csv, text)");
      }
      o.formats.push_back(s);
    }
  }
  return o;
}

}  // namespace

bool OutputSpec::wants(const std::string& f) const {
  return std::find(formats.begin(), formats.end(), f) != formats.end();
}

std::uint64_t ExperimentConfig::seed() const {
  if (!run.seed) throw ConfigError("run.seed is required (or pass --seed)");
  return *run.seed;
}

TracerModel ExperimentConfig::tracer_model() const {
  if (!tracer) throw ConfigError("this command needs a 'tracer' section");
  try {
    return TracerModel(model, tracer->functions, tracer->noise_covariance, tracer->drift_law,
                       tracer->initial, tracer->x0);
  } catch (const ModelError& e) {
    throw ConfigError(std::string("tracer: ") + e.what());
  } catch (const NumericalError& e) {
    throw ConfigError(std::string("tracer: ") + e.what());
  }
}

double parse_length(const json& value) {
  if (value.is_number()) {
    const double v = value.get<double>();
    if (!std::isfinite(v)) throw ConfigError("length must be finite");
    return v;
  }
  if (!value.is_string()) throw ConfigError("length must be a number or a string like \"2pi\"");
  std::string s;
  for (char c : value.get<std::string>()) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  double divisor = 1.0;
  if (const auto slash = s.find('/'); slash != std::string::npos) {
    try {
      std::size_t used = 0;
      divisor = std::stod(s.substr(slash + 1), &used);
      if (used != s.size() - slash - 1) throw ConfigError("");
    } catch (const std::exception&) {
      throw ConfigError("cannot parse length '" + value.get<std::string>() + "'");
    }
    s = s.substr(0, slash);
  }
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    if (!s.empty() && s.back() == '*') s.pop_back();
    if (s.empty()) s = "1";
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || divisor == 0.0) throw ConfigError("");
    return v * factor / divisor;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse length '" + value.get<std::string>() + "'");
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& content, const Overrides& ov) {
  json root;
  try {
    root = json::parse(content, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  allow_keys(root, "config", {"name", "model", "tracer", "run", "output"});
  if (!root.contains("model")) throw ConfigError("config: missing 'model' section");

  ExperimentConfig cfg;
  cfg.name = root.contains("name") ? text(root["name"], "name") : "experiment";
  cfg.model = parse_model(root["model"], cfg.name);
  if (root.contains("tracer")) cfg.tracer = parse_tracer(root["tracer"], *cfg.model);
  cfg.run = root.contains("run") ? parse_run(root["run"]) : RunSpec{};
  cfg.output = root.contains("output") ? parse_output(root["output"]) : OutputSpec{};
  if (ov.seed) cfg.run.seed = ov.seed;
  if (ov.workers) cfg.run.workers = *ov.workers;
  if (ov.out_dir) cfg.output.dir = *ov.out_dir;

  cfg.canonical = root;
  cfg.canonical.erase("output");
  if (cfg.canonical.contains("run")) cfg.canonical["run"].erase("workers");
  if (cfg.run.seed) cfg.canonical["run"]["seed"] = *cfg.run.seed;
  cfg.hash = fnv1a_hex(cfg.canonical.dump());
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), ov);
}

}  // namespace tracer
