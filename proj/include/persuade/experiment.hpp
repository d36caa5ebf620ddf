/* Copyright 2026 The persuade-ot Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */
#pragma once

// Configuration-driven experiments: config parsing, scenario runs, parameter
// sweeps and diagram export. The config file format is documented in
// docs/config.md.

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "persuade/benchmarks.hpp"
#include "persuade/optimizer.hpp"

namespace persuade {

/// Bad config file: syntax error, missing key, wrong type or invalid value.
/// `where` is "line L, column C" for syntax errors or a dotted key path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string &where, const std::string &what)
      : std::runtime_error(where + ": " + what), where_(where) {}
  const std::string &where() const { return where_; }

 private:
  std::string where_;
};

enum class EpsilonUnits { absolute, grid };

struct GridSpec {
  std::optional<Rect> bounds;  // defaults to the quality square for monopolist payoffs
  int resolution = 256;
};

struct ObjectiveSpec {
  double epsilon = 0.01;
  EpsilonUnits units = EpsilonUnits::absolute;  // grid: multiples of the cell width
  double eta = 0.0;
};

struct SweepSpec {
  std::string parameter;  // dotted key path, e.g. "payoff.market.p2"
  std::vector<double> values;

  /// Last path component, used as the table's parameter label.
  std::string label() const;
};

struct ExperimentConfig {
  GridSpec grid;
  PayoffModel payoff{ConcaveBowl{}};
  ObjectiveSpec objective;
  OptimizerConfig optimizer;
  int restarts = 1;        // optimizer seeds seed, seed + 1, ...
  int lloyd_seeds = 5;
  std::optional<SweepSpec> sweep;
  std::string output_dir = "out";

  Rect bounds() const;
  GridMeasure build_measure() const;
  /// Absolute blur for this config's grid.
  double epsilon() const;
  ObjectiveConfig objective_config() const;
};

ExperimentConfig config_from_json(const nlohmann::json &doc);
nlohmann::json config_to_json(const ExperimentConfig &cfg);

/// Parses config text, reporting syntax errors with line and column.
nlohmann::json parse_config_text(const std::string &text);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Config for one sweep point: the raw document with `parameter` set to
/// `value` and the sweep removed.
ExperimentConfig sweep_point(const nlohmann::json &doc, const SweepSpec &sweep, double value);

struct RestartSummary {
  std::uint64_t seed = 0;
  double best_hard_value = 0.0;
  double final_soft_value = 0.0;
  int effective_n = 0;
  int iterations = 0;
};

struct ScenarioResult {
  ExperimentConfig config;
  OptResult best;  // restart with the largest best_hard_value
  std::vector<RestartSummary> restarts;
  /// Reported policy: the best hard iterate, restricted to occupied cells.
  DiagramParams policy;
  double policy_value = 0.0;
  int effective_n = 0;
  std::optional<BenchmarkRow> benchmarks;  // monopolist payoffs only
};

/// Runs all restarts and, for monopolist payoffs, the benchmark policies.
ScenarioResult run_scenario(const ExperimentConfig &cfg);

/// Benchmarks only. Lloyd uses `n` cells.
BenchmarkRow run_benchmarks(const ExperimentConfig &cfg, int n);

nlohmann::json result_to_json(const ScenarioResult &result);

struct DiagramExport {
  Rect bounds;
  int resolution = 0;
  DiagramParams params;
  std::vector<double> masses;
  std::vector<std::optional<Vec2>> barycenters;
  std::vector<std::int32_t> label_grid;  // row-major, row 0 at the lower edge
};

DiagramExport make_diagram(const DiagramParams &params, const GridMeasure &grid);
nlohmann::json diagram_to_json(const DiagramExport &d);
DiagramExport diagram_from_json(const nlohmann::json &doc);
std::string diagram_to_svg(const DiagramExport &d);

/// Writes diagram.json and diagram.svg into `dir`.
void export_diagram(const DiagramParams &params, const GridMeasure &grid,
                    const std::filesystem::path &dir);

/// Throws std::runtime_error naming the path on failure.
void write_file(const std::filesystem::path &path, const std::string &text);

std::string dump_json(const nlohmann::json &doc);

}  // namespace persuade
