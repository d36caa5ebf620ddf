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
#include "persuade/cli.hpp"

#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "persuade/experiment.hpp"

namespace persuade {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_overrides(json &doc, const CliOptions &o) {
  if (!doc.is_object()) throw ConfigError("<root>", "expected an object");
  if (o.seed) doc["optimizer"]["seed"] = *o.seed;
  if (o.out_dir) doc["output_dir"] = *o.out_dir;
  if (o.resolution) doc["grid"]["resolution"] = *o.resolution;
  if (o.epsilon) doc["objective"]["epsilon"] = *o.epsilon;
  if (o.eta) doc["objective"]["eta"] = *o.eta;
}

std::string row_dir_name(const SweepSpec &sweep, double value) {
  return fmt::format("{}_{:.4f}", sweep.label(), value);
}

void write_scenario(const ScenarioResult &result, const fs::path &dir) {
  write_file(dir / "result.json", dump_json(result_to_json(result)));
  export_diagram(result.policy, result.config.build_measure(), dir);
}

void print_summary(const ScenarioResult &r, std::ostream &out) {
  out << fmt::format("payoff {}  epsilon {:.6g}  eta {:.3g}\n", r.config.payoff.name(), r.config.epsilon(),
                     r.config.objective.eta);
  for (const auto &s : r.restarts)
    out << fmt::format("  seed {:>4}  best hard {:.6f}  final soft {:.6f}  effective_n {}\n", s.seed,
                       s.best_hard_value, s.final_soft_value, s.effective_n);
  out << fmt::format("policy value {:.6f}  effective_n {}\n", r.policy_value, r.effective_n);
  for (std::size_t i = 0; i < r.policy.size(); ++i)
    out << fmt::format("  cell {:>2}  site ({:+.4f}, {:+.4f})  g {:+.5f}\n", i, r.policy.sites[i].x,
                       r.policy.sites[i].y, r.policy.weights[i]);
  if (r.benchmarks) {
    const auto &b = *r.benchmarks;
    out << fmt::format("R_opt {:.4f}  R(noinfo) {:.4f}  R_Lloyd {:.4f}  E(R) {:.4f}  pp {}\n", b.r_opt,
                       b.r_noinfo, b.r_lloyd, b.r_fullinfo, b.pp ? fmt::format("{:.2f}", *b.pp) : "NA");
  }
}

int cmd_solve(const json &doc, const ExperimentConfig &cfg, std::ostream &out, std::ostream &err) {
  (void)doc;
  if (cfg.sweep) throw ConfigError("sweep", "solve runs a single scenario; use the table command");
  err << "solving " << cfg.payoff.name() << " at resolution " << cfg.grid.resolution << "\n";
  const auto result = run_scenario(cfg);
  write_scenario(result, cfg.output_dir);
  print_summary(result, out);
  return kExitOk;
}

int cmd_table(const json &doc, const ExperimentConfig &cfg, std::ostream &out, std::ostream &err) {
  if (!cfg.sweep) throw ConfigError("sweep", "missing required key");
  if (!std::holds_alternative<Monopolist>(cfg.payoff.kind()))
    throw ConfigError("payoff.kind", "table needs a monopolist payoff");
  std::vector<BenchmarkRow> rows;
  for (double v : cfg.sweep->values) {
    const auto point = sweep_point(doc, *cfg.sweep, v);
    err << fmt::format("{} = {:.4f}\n", cfg.sweep->label(), v);
    const auto result = run_scenario(point);
    write_scenario(result, fs::path(cfg.output_dir) / row_dir_name(*cfg.sweep, v));
    BenchmarkRow row = *result.benchmarks;
    row.param_name = cfg.sweep->label();
    row.param = v;
    rows.push_back(row);
  }
  const auto table = improvement_table(std::move(rows));
  write_file(fs::path(cfg.output_dir) / "table.csv", table.to_csv());
  write_file(fs::path(cfg.output_dir) / "table.txt", table.render_text());
  out << table.render_text();
  return kExitOk;
}

int cmd_benchmark(const json &doc, const ExperimentConfig &cfg, std::ostream &out, std::ostream &) {
  std::vector<std::pair<double, ExperimentConfig>> points;
  if (cfg.sweep)
    for (double v : cfg.sweep->values) points.emplace_back(v, sweep_point(doc, *cfg.sweep, v));
  else
    points.emplace_back(0.0, cfg);
  std::string csv = "param,r_noinfo,r_lloyd,r_fullinfo,lloyd_n,lloyd_seed\n";
  for (const auto &[v, c] : points) {
    const auto row = run_benchmarks(c, c.optimizer.n_init);
    csv += fmt::format("{:.4f},{:.4f},{:.4f},{:.4f},{},{}\n", v, row.r_noinfo, row.r_lloyd, row.r_fullinfo,
                       row.effective_n, row.lloyd_seed);
  }
  write_file(fs::path(cfg.output_dir) / "benchmarks.csv", csv);
  out << csv;
  return kExitOk;
}

void rerender(const fs::path &dir, const ExperimentConfig &cfg, std::ostream &err) {
  const json result = read_json_file(dir / "result.json");
  DiagramParams policy;
  for (const auto &s : result.at("policy").at("sites")) policy.sites.push_back({s[0].get<double>(), s[1].get<double>()});
  policy.weights = result.at("policy").at("weights").get<std::vector<double>>();
  policy.validate();
  export_diagram(policy, cfg.build_measure(), dir);
  err << "re-rendered " << (dir / "diagram.svg").string() << "\n";
}

int cmd_export(const json &doc, const ExperimentConfig &cfg, std::ostream &, std::ostream &err) {
  if (cfg.sweep) {
    for (double v : cfg.sweep->values)
      rerender(fs::path(cfg.output_dir) / row_dir_name(*cfg.sweep, v), sweep_point(doc, *cfg.sweep, v), err);
  } else {
    rerender(cfg.output_dir, cfg, err);
  }
  return kExitOk;
}

}  // namespace

int run_command(const CliOptions &options, std::ostream &out, std::ostream &err) {
  json doc;
  ExperimentConfig cfg;
  try {
    doc = read_json_file(options.config_path);
    apply_overrides(doc, options);
    cfg = config_from_json(doc);
  } catch (const ConfigError &e) {
    err << "invalid config " << options.config_path << ": " << e.what() << "\n";
    return kExitInvalidConfig;
  }

  try {
    if (options.command == "solve") return cmd_solve(doc, cfg, out, err);
    if (options.command == "table") return cmd_table(doc, cfg, out, err);
    if (options.command == "benchmark") return cmd_benchmark(doc, cfg, out, err);
    if (options.command == "export") return cmd_export(doc, cfg, out, err);
    err << "unknown command " << options.command << "\n";
    return kExitError;
  } catch (const ConfigError &e) {
    err << "invalid config " << options.config_path << ": " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const NumericFailure &e) {
    err << "numeric failure: " << e.what() << "\n";
    json state = {{"iteration", e.iteration()}, {"weights", e.last_valid().weights}, {"sites", json::array()}};
    for (const auto &s : e.last_valid().sites) state["sites"].push_back({s.x, s.y});
    try {
      const fs::path dump = fs::path(cfg.output_dir) / "failure.json";
      write_file(dump, dump_json(state));
      err << "last valid state written to " << dump.string() << "\n";
    } catch (const std::exception &io) {
      err << io.what() << "\n";
    }
    return kExitNumericFailure;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace persuade
