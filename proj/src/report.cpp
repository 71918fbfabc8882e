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

#include "tracer/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tracer/error.hpp"

namespace tracer {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string cell(double v, int precision) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Mat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vec(m.row(i).transpose())));
  return a;
}

json to_json(const LatticePoint& k) { return json(k); }

json to_json(const CovarianceReport& r) {
  json j;
  j["method"] = r.method;
  j["invariant"] = r.invariant;
  j["valid"] = r.valid;
  j["sigma"] = to_json(r.sigma);
  j["c_tilde"] = to_json(r.c_tilde);
  j["c"] = to_json(r.c);
  j["min_eigenvalue_c_tilde"] = r.min_eigenvalue;
  j["diagnostics"] = r.diagnostics;
  j["notes"] = r.notes;
  return j;
}

json to_json(const ErgodicityCheck& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["k0"] = r.k0 ? json(*r.k0) : json(nullptr);
  j["min_re_q"] = r.min_re_q;
  j["argmin"] = r.argmin;
  j["k_max"] = r.k_max;
  j["convention"] = r.convention == FrequencyConvention::kPerAxis ? "per_axis" : "scalar_volume";
  return j;
}

json to_json(const StrongErgodicityHint& r) {
  json j;
  j["not_strongly_ergodic"] = r.not_strongly_ergodic;
  j["first_shell_min"] = r.first_shell_min;
  j["outer_min"] = r.outer_min;
  j["outer_argmin"] = r.outer_argmin;
  return j;
}

json to_json(const SummabilityReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["total"] = r.total;
  j["raabe"] = r.raabe ? json(*r.raabe) : json(nullptr);
  j["k0"] = r.k0 ? json(*r.k0) : json(nullptr);
  j["shells"] = r.shell_contribution.size();
  return j;
}

json to_json(const SectorCheck& r) {
  json j;
  j["pass"] = r.pass;
  j["c"] = r.c;
  j["worst_xi"] = r.worst_xi ? to_json(*r.worst_xi) : json(nullptr);
  return j;
}

json to_json(const HeatKernelReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  j["integral"] = r.integral;
  j["tail_fraction"] = r.tail_fraction;
  j["tail_value"] = r.tail_value;
  j["decay_rate"] = r.decay_rate;
  return j;
}

json to_json(const TvDecayReport& r) {
  json j;
  j["times"] = r.times;
  j["tv"] = r.tv;
  j["tv_binned"] = r.tv_binned;
  j["tv_fourier"] = r.tv_fourier;
  j["noise_floor"] = r.noise_floor;
  j["lambda"] = r.lambda;
  j["Lambda"] = r.big_lambda;
  j["fitted_points"] = r.fitted_points;
  j["non_decaying"] = r.non_decaying;
  j["reference"] = r.reference;
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const KsResult& r) {
  return json{{"statistic", r.statistic}, {"p_value", r.p_value}, {"n", r.n}};
}

json to_json(const EnsembleStats& r) {
  json j;
  j["count"] = r.count;
  j["mean"] = to_json(r.mean);
  j["mean_stderr"] = to_json(r.mean_stderr);
  j["covariance"] = to_json(r.covariance);
  j["covariance_stderr"] = to_json(r.covariance_stderr);
  json ks = json::array();
  for (const auto& k : r.ks) ks.push_back(to_json(k));
  j["ks"] = ks;
  return j;
}

json to_json(const JumpCapResult& r) {
  return json{{"max_rescaled_increment", r.max_rescaled_increment},
              {"cap", r.cap},
              {"bound", r.bound},
              {"jumps", r.jumps},
              {"pass", r.pass}};
}

json to_json(const LlnReport& r) {
  json j;
  json rungs = json::array();
  for (const auto& g : r.rungs) {
    rungs.push_back({{"n", g.n},
                     {"mean_deviation", g.mean_deviation},
                     {"stderr", g.standard_error},
                     {"max_deviation", g.max_deviation}});
  }
  j["rungs"] = rungs;
  j["slope"] = r.slope;
  j["strictly_decreasing"] = r.strictly_decreasing;
  j["centering"] = r.centering;
  return j;
}

json to_json(const CltReport& r) {
  json j;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"t", row.t},
                    {"conditional", to_json(row.stats)},
                    {"unconditional", to_json(row.unconditional)},
                    {"theoretical", to_json(row.theoretical)},
                    {"relative_error", row.relative_error},
                    {"within_3se", row.within_3se},
                    {"min_ks_p", row.min_ks_p}});
  }
  j["rows"] = rows;
  j["pass"] = r.pass;
  j["linearity_spread"] = r.linearity_spread;
  j["jump_cap"] = to_json(r.jump_cap);
  j["notes"] = r.notes;
  return j;
}

// ---------------------------------------------------------------------------

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw Error("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

TextTable::TextTable(std::vector<std::string> header) : header_(std::move(header)) {}

void TextTable::add_row(std::vector<std::string> cells) {
  cells.resize(header_.size());
  rows_.push_back(std::move(cells));
}

std::string TextTable::str() const {
  std::vector<std::size_t> width(header_.size());
  for (std::size_t i = 0; i < header_.size(); ++i) width[i] = header_[i].size();
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << "  ";
      out << cells[i];
      if (i + 1 < cells.size()) out << std::string(width[i] - cells[i].size(), ' ');
    }
    out << '\n';
  };
  line(header_);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& r : rows_) line(r);
  return out.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

}  // namespace tracer
