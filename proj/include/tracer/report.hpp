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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracer/ergodic.hpp"
#include "tracer/linalg.hpp"
#include "tracer/stats.hpp"
#include "tracer/symbols.hpp"

namespace tracer {

/// Shortest round-trip text for a double ("%.17g"); nan/inf spelled out.
std::string format_number(double v);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const LatticePoint& k);
nlohmann::json to_json(const CovarianceReport& r);
nlohmann::json to_json(const ErgodicityCheck& r);
nlohmann::json to_json(const StrongErgodicityHint& r);
nlohmann::json to_json(const SummabilityReport& r);
nlohmann::json to_json(const SectorCheck& r);
nlohmann::json to_json(const HeatKernelReport& r);
nlohmann::json to_json(const TvDecayReport& r);
nlohmann::json to_json(const KsResult& r);
nlohmann::json to_json(const EnsembleStats& r);
nlohmann::json to_json(const JumpCapResult& r);
nlohmann::json to_json(const LlnReport& r);
nlohmann::json to_json(const CltReport& r);

/// Comma-separated table with a header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Whitespace-aligned table for terminal output.
class TextTable {
 public:
  explicit TextTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Fixed-precision cell text for human tables.
std::string cell(double v, int precision = 6);

void write_file(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace tracer
