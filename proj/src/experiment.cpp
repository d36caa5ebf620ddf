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
#include "persuade/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace persuade {

using nlohmann::json;

namespace {

std::string join(const std::string &path, const std::string &key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json &obj, const std::string &path, std::initializer_list<const char *> allowed) {
  if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &item : obj.items())
    if (!ok.count(item.key())) throw ConfigError(join(path, item.key()), "unknown key");
}

const json &require(const json &obj, const std::string &path, const char *key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "missing required key");
  return obj.at(key);
}

double number(const json &obj, const std::string &path, const char *key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  return v.get<double>();
}

long long integer(const json &obj, const std::string &path, const char *key, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_number_integer() && !v.is_number_unsigned())
    throw ConfigError(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::uint64_t unsigned_integer(const json &obj, const std::string &path, const char *key,
                               std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return v.get<std::uint64_t>();
  throw ConfigError(join(path, key), "expected a nonnegative integer");
}

bool boolean(const json &obj, const std::string &path, const char *key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::string text(const json &obj, const std::string &path, const char *key,
                 const std::string &fallback) {
  if (!obj.contains(key)) return fallback;
  const auto &v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

template <class E>
E choice(const json &obj, const std::string &path, const char *key, E fallback,
         std::initializer_list<std::pair<const char *, E>> options) {
  if (!obj.contains(key)) return fallback;
  const std::string v = text(obj, path, key, "");
  std::string names;
  for (const auto &[name, value] : options) {
    if (v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError(join(path, key), "expected one of " + names + ", got \"" + v + "\"");
}

Vec2 point(const json &v, const std::string &path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ConfigError(path, "expected a pair [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

json to_json(const Vec2 &v) { return json::array({v.x, v.y}); }

template <class F>
void wrap_validation(const std::string &path, F &&f) {
  try {
    f();
  } catch (const InvalidParams &e) {
    throw ConfigError(path, e.what());
  }
}

PayoffModel payoff_from_json(const json &p) {
  const std::string path = "payoff";
  if (!p.is_object()) throw ConfigError(path, "expected an object");
  const std::string kind = text(p, path, "kind", "");
  if (!p.contains("kind")) throw ConfigError("payoff.kind", "missing required key");

  PayoffModel::Kind k;
  if (kind == "concave_bowl") {
    check_keys(p, path, {"kind", "center", "height", "curvature", "gradient"});
    ConcaveBowl b;
    if (p.contains("center")) b.center = point(p["center"], "payoff.center");
    b.height = number(p, path, "height", b.height);
    b.curvature = number(p, path, "curvature", b.curvature);
    k = b;
  } else if (kind == "tri_modal") {
    check_keys(p, path, {"kind", "centers", "sigma", "height", "gradient"});
    TriModal t;
    if (p.contains("centers")) {
      const auto &c = p["centers"];
      if (!c.is_array() || c.size() != 3) throw ConfigError("payoff.centers", "expected three points");
      for (std::size_t i = 0; i < 3; ++i)
        t.centers[i] = point(c[i], fmt::format("payoff.centers[{}]", i));
    }
    t.sigma = number(p, path, "sigma", t.sigma);
    t.height = number(p, path, "height", t.height);
    k = t;
  } else if (kind == "affine") {
    check_keys(p, path, {"kind", "c0", "c1", "c2", "gradient"});
    Affine a;
    a.c0 = number(p, path, "c0", 0.0);
    a.c1 = number(p, path, "c1", 0.0);
    a.c2 = number(p, path, "c2", 0.0);
    k = a;
  } else if (kind == "monopolist") {
    check_keys(p, path, {"kind", "market", "gradient"});
    MarketConfig m;
    if (p.contains("market")) {
      const auto &mk = p["market"];
      const std::string mp = "payoff.market";
      check_keys(mk, mp, {"demand", "p1", "p2", "delta", "q_min", "q_max"});
      m.demand = choice(mk, mp, "demand", Demand::unit,
                        {{"unit", Demand::unit}, {"additive", Demand::additive}});
      m.p1 = number(mk, mp, "p1", m.p1);
      m.p2 = number(mk, mp, "p2", m.p2);
      m.delta = number(mk, mp, "delta", m.delta);
      m.q_min = number(mk, mp, "q_min", m.q_min);
      m.q_max = number(mk, mp, "q_max", m.q_max);
    }
    wrap_validation("payoff.market", [&] { m.validate(); });
    k = Monopolist{m};
  } else {
    throw ConfigError("payoff.kind", "expected one of concave_bowl, tri_modal, affine, monopolist, got \"" +
                                         kind + "\"");
  }

  std::optional<PayoffModel> model;
  wrap_validation(path, [&] { model.emplace(k); });
  if (p.contains("gradient")) {
    const auto &g = p["gradient"];
    const std::string gp = "payoff.gradient";
    check_keys(g, gp, {"mode", "step"});
    const auto mode = choice(g, gp, "mode", model->gradient_mode(),
                             {{"analytic", GradientMode::analytic},
                              {"central_difference", GradientMode::central_difference}});
    const double step = number(g, gp, "step", model->fd_step());
    wrap_validation(gp, [&] { model.emplace(k, mode, step); });
  }
  return *model;
}

json payoff_to_json(const PayoffModel &model) {
  json p;
  struct V {
    json &p;
    void operator()(const ConcaveBowl &b) const {
      p["kind"] = "concave_bowl";
      p["center"] = to_json(b.center);
      p["height"] = b.height;
      p["curvature"] = b.curvature;
    }
    void operator()(const TriModal &t) const {
      p["kind"] = "tri_modal";
      p["centers"] = json::array();
      for (const auto &c : t.centers) p["centers"].push_back(to_json(c));
      p["sigma"] = t.sigma;
      p["height"] = t.height;
    }
    void operator()(const Affine &a) const {
      p["kind"] = "affine";
      p["c0"] = a.c0;
      p["c1"] = a.c1;
      p["c2"] = a.c2;
    }
    void operator()(const Monopolist &m) const {
      p["kind"] = "monopolist";
      p["market"] = {{"demand", m.market.demand == Demand::unit ? "unit" : "additive"},
                     {"p1", m.market.p1},
                     {"p2", m.market.p2},
                     {"delta", m.market.delta},
                     {"q_min", m.market.q_min},
                     {"q_max", m.market.q_max}};
    }
  };
  std::visit(V{p}, model.kind());
  p["gradient"] = {
      {"mode", model.gradient_mode() == GradientMode::analytic ? "analytic" : "central_difference"},
      {"step", model.fd_step()}};
  return p;
}

std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json::json_pointer pointer_for(const std::string &dotted) {
  std::string p;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("sweep.parameter", "empty path component in \"" + dotted + "\"");
    p += "/" + part;
  }
  return json::json_pointer(p);
}

}  // namespace

std::string SweepSpec::label() const {
  const auto dot = parameter.rfind('.');
  return dot == std::string::npos ? parameter : parameter.substr(dot + 1);
}

Rect ExperimentConfig::bounds() const {
  if (const auto *m = std::get_if<Monopolist>(&payoff.kind())) return m->market.quality_bounds();
  return grid.bounds.value_or(Rect::square(0.0, 1.0));
}

GridMeasure ExperimentConfig::build_measure() const { return build_grid(bounds(), grid.resolution); }

double ExperimentConfig::epsilon() const {
  if (objective.units == EpsilonUnits::absolute) return objective.epsilon;
  return objective.epsilon * bounds().width() / grid.resolution;
}

ObjectiveConfig ExperimentConfig::objective_config() const {
  ObjectiveConfig oc;
  oc.eta = objective.eta;
  oc.entropic.epsilon = epsilon();
  oc.payoff = payoff;
  return oc;
}

ExperimentConfig config_from_json(const json &doc) {
  check_keys(doc, "", {"grid", "payoff", "objective", "optimizer", "benchmarks", "sweep", "output_dir"});
  ExperimentConfig cfg;

  cfg.payoff = payoff_from_json(require(doc, "", "payoff"));
  const bool monopolist = std::holds_alternative<Monopolist>(cfg.payoff.kind());

  if (doc.contains("grid")) {
    const auto &g = doc["grid"];
    check_keys(g, "grid", {"bounds", "resolution"});
    const long long res = integer(g, "grid", "resolution", cfg.grid.resolution);
    if (res < 1 || res > 4096) throw ConfigError("grid.resolution", "expected an integer in [1, 4096]");
    cfg.grid.resolution = static_cast<int>(res);
    if (g.contains("bounds")) {
      const auto &b = g["bounds"];
      check_keys(b, "grid.bounds", {"lo", "hi"});
      const Rect r{point(require(b, "grid.bounds", "lo"), "grid.bounds.lo"),
                   point(require(b, "grid.bounds", "hi"), "grid.bounds.hi")};
      if (r.degenerate()) throw ConfigError("grid.bounds", "bounds must satisfy lo < hi in both axes");
      if (monopolist) {
        const Rect q = std::get<Monopolist>(cfg.payoff.kind()).market.quality_bounds();
        if (!(r.lo == q.lo && r.hi == q.hi))
          throw ConfigError("grid.bounds",
                            "monopolist grids cover [q_min, q_max]^2; omit bounds or match them");
      }
      cfg.grid.bounds = r;
    }
  }

  if (doc.contains("objective")) {
    const auto &o = doc["objective"];
    check_keys(o, "objective", {"epsilon", "epsilon_units", "eta"});
    cfg.objective.epsilon = number(o, "objective", "epsilon", cfg.objective.epsilon);
    cfg.objective.units = choice(o, "objective", "epsilon_units", cfg.objective.units,
                                 {{"absolute", EpsilonUnits::absolute}, {"grid", EpsilonUnits::grid}});
    cfg.objective.eta = number(o, "objective", "eta", cfg.objective.eta);
    if (!(cfg.objective.epsilon > 0.0)) throw ConfigError("objective.epsilon", "must be positive");
    if (!(cfg.objective.eta >= 0.0)) throw ConfigError("objective.eta", "must be >= 0");
  }

  if (doc.contains("optimizer")) {
    const auto &o = doc["optimizer"];
    const std::string op = "optimizer";
    check_keys(o, op, {"n_init", "max_iters", "learning_rate", "adam_beta1", "adam_beta2", "adam_eps",
                       "seed", "init", "grad_mode", "batch_size", "prune_mass_tol", "stop_grad_tol",
                       "annealing", "restarts"});
    auto &oc = cfg.optimizer;
    oc.n_init = static_cast<int>(integer(o, op, "n_init", oc.n_init));
    oc.max_iters = static_cast<int>(integer(o, op, "max_iters", oc.max_iters));
    oc.learning_rate = number(o, op, "learning_rate", oc.learning_rate);
    oc.adam_beta1 = number(o, op, "adam_beta1", oc.adam_beta1);
    oc.adam_beta2 = number(o, op, "adam_beta2", oc.adam_beta2);
    oc.adam_eps = number(o, op, "adam_eps", oc.adam_eps);
    oc.seed = unsigned_integer(o, op, "seed", oc.seed);
    oc.init = choice(o, op, "init", oc.init,
                     {{"uniform_random", InitStrategy::uniform_random},
                      {"jittered_grid", InitStrategy::jittered_grid}});
    oc.grad_mode = choice(o, op, "grad_mode", oc.grad_mode,
                          {{"full_grid", GradMode::full_grid}, {"monte_carlo", GradMode::monte_carlo}});
    oc.batch_size = static_cast<int>(integer(o, op, "batch_size", oc.batch_size));
    oc.prune_mass_tol = number(o, op, "prune_mass_tol", oc.prune_mass_tol);
    oc.stop_grad_tol = number(o, op, "stop_grad_tol", oc.stop_grad_tol);
    if (o.contains("annealing")) {
      const auto &a = o["annealing"];
      const std::string ap = "optimizer.annealing";
      check_keys(a, ap, {"enabled", "start_epsilon", "decay"});
      oc.annealing.enabled = boolean(a, ap, "enabled", oc.annealing.enabled);
      oc.annealing.start_epsilon = number(a, ap, "start_epsilon", oc.annealing.start_epsilon);
      oc.annealing.decay = number(a, ap, "decay", oc.annealing.decay);
    }
    const long long restarts = integer(o, op, "restarts", cfg.restarts);
    if (restarts < 1) throw ConfigError("optimizer.restarts", "must be >= 1");
    cfg.restarts = static_cast<int>(restarts);
    wrap_validation(op, [&] { oc.validate(); });
  }

  if (doc.contains("benchmarks")) {
    const auto &b = doc["benchmarks"];
    check_keys(b, "benchmarks", {"lloyd_seeds"});
    const long long k = integer(b, "benchmarks", "lloyd_seeds", cfg.lloyd_seeds);
    if (k < 1) throw ConfigError("benchmarks.lloyd_seeds", "must be >= 1");
    cfg.lloyd_seeds = static_cast<int>(k);
  }

  if (doc.contains("sweep")) {
    const auto &s = doc["sweep"];
    check_keys(s, "sweep", {"parameter", "values"});
    SweepSpec sweep;
    sweep.parameter = text(s, "sweep", "parameter", "");
    if (sweep.parameter.empty()) throw ConfigError("sweep.parameter", "missing required key");
    const auto &values = require(s, "sweep", "values");
    if (!values.is_array() || values.empty())
      throw ConfigError("sweep.values", "expected a nonempty array of numbers");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i].is_number()) throw ConfigError(fmt::format("sweep.values[{}]", i), "expected a number");
      sweep.values.push_back(values[i].get<double>());
    }
    const auto ptr = pointer_for(sweep.parameter);
    if (!doc.contains(ptr) || !doc.at(ptr).is_number())
      throw ConfigError("sweep.parameter",
                        "\"" + sweep.parameter + "\" must name a numeric key present in this file");
    cfg.sweep = std::move(sweep);
  }

  cfg.output_dir = text(doc, "", "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");
  return cfg;
}

json config_to_json(const ExperimentConfig &cfg) {
  json doc;
  doc["grid"]["resolution"] = cfg.grid.resolution;
  if (cfg.grid.bounds)
    doc["grid"]["bounds"] = {{"lo", to_json(cfg.grid.bounds->lo)}, {"hi", to_json(cfg.grid.bounds->hi)}};
  doc["payoff"] = payoff_to_json(cfg.payoff);
  doc["objective"] = {{"epsilon", cfg.objective.epsilon},
                      {"epsilon_units", cfg.objective.units == EpsilonUnits::absolute ? "absolute" : "grid"},
                      {"eta", cfg.objective.eta}};
  const auto &oc = cfg.optimizer;
  doc["optimizer"] = {
      {"n_init", oc.n_init},
      {"max_iters", oc.max_iters},
      {"learning_rate", oc.learning_rate},
      {"adam_beta1", oc.adam_beta1},
      {"adam_beta2", oc.adam_beta2},
      {"adam_eps", oc.adam_eps},
      {"seed", oc.seed},
      {"init", oc.init == InitStrategy::uniform_random ? "uniform_random" : "jittered_grid"},
      {"grad_mode", oc.grad_mode == GradMode::full_grid ? "full_grid" : "monte_carlo"},
      {"batch_size", oc.batch_size},
      {"prune_mass_tol", oc.prune_mass_tol},
      {"stop_grad_tol", oc.stop_grad_tol},
      {"annealing",
       {{"enabled", oc.annealing.enabled},
        {"start_epsilon", oc.annealing.start_epsilon},
        {"decay", oc.annealing.decay}}},
      {"restarts", cfg.restarts}};
  doc["benchmarks"] = {{"lloyd_seeds", cfg.lloyd_seeds}};
  if (cfg.sweep) doc["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  doc["output_dir"] = cfg.output_dir;
  return doc;
}

json parse_config_text(const std::string &text) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error &e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    if (const auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(fmt::format("line {}, column {}", line, col), msg);
  }
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(parse_config_text(ss.str()));
}

ExperimentConfig sweep_point(const json &doc, const SweepSpec &sweep, double value) {
  json point_doc = doc;
  point_doc.erase("sweep");
  point_doc[pointer_for(sweep.parameter)] = value;
  return config_from_json(point_doc);
}

namespace {

DiagramParams occupied_only(const DiagramParams &params, const GridMeasure &grid) {
  const auto stats = hard_cell_stats(hard_assign(params, grid), grid);
  DiagramParams out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!stats.occupied(i)) continue;
    out.sites.push_back(params.sites[i]);
    out.weights.push_back(params.weights[i]);
  }
  return out;
}

}  // namespace

BenchmarkRow run_benchmarks(const ExperimentConfig &cfg, int n) {
  const auto *m = std::get_if<Monopolist>(&cfg.payoff.kind());
  if (!m) throw ConfigError("payoff.kind", "benchmarks need a monopolist payoff");
  const GridMeasure grid = cfg.build_measure();
  BenchmarkRow row;
  row.market = m->market;
  row.r_noinfo = no_info_revenue(m->market, grid);
  row.r_fullinfo = full_info_revenue(m->market, grid);
  const auto lloyd = best_lloyd_revenue(n, m->market, grid, cfg.optimizer.seed, cfg.lloyd_seeds);
  row.r_lloyd = lloyd.value;
  row.lloyd_seed = lloyd.seed;
  row.effective_n = n;
  row.seed = cfg.optimizer.seed;
  return row;
}

ScenarioResult run_scenario(const ExperimentConfig &cfg) {
  const GridMeasure grid = cfg.build_measure();
  const ObjectiveConfig obj = cfg.objective_config();
  ScenarioResult out;
  out.config = cfg;
  bool have = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    OptimizerConfig oc = cfg.optimizer;
    oc.seed = cfg.optimizer.seed + static_cast<std::uint64_t>(r);
    const auto init = init_sites(oc.n_init, grid, oc.seed, oc.init);
    OptResult res = optimize(init, grid, obj, oc);
    out.restarts.push_back({oc.seed, res.best_hard_value, res.report.value, res.effective_n, res.iterations});
    if (!have || res.best_hard_value > out.best.best_hard_value) {
      out.best = std::move(res);
      have = true;
    }
  }
  out.policy = occupied_only(out.best.best_hard_params, grid);
  out.policy_value = hard_objective(out.policy, grid, cfg.payoff);
  out.effective_n = static_cast<int>(out.policy.size());

  if (std::holds_alternative<Monopolist>(cfg.payoff.kind())) {
    BenchmarkRow row = run_benchmarks(cfg, out.effective_n);
    row.r_opt = out.policy_value;
    row.pp = improvement_pp(row.r_opt, row.r_fullinfo);
    row.seed = out.best.seed_used;
    out.benchmarks = row;
  }
  return out;
}

namespace {

json params_to_json(const DiagramParams &p) {
  json sites = json::array();
  for (const auto &s : p.sites) sites.push_back(to_json(s));
  return {{"sites", sites}, {"weights", p.weights}};
}

json report_to_json(const ObjectiveReport &r) {
  json cells = json::array();
  for (const auto &c : r.per_cell)
    cells.push_back({{"mass", c.mass}, {"barycenter", to_json(c.barycenter)}, {"phi", c.phi}});
  return {{"value", r.value},
          {"payoff_term", r.payoff_term},
          {"penalty_term", r.penalty_term},
          {"quantization_term", r.quantization_term},
          {"repulsion_term", r.repulsion_term},
          {"cells", cells}};
}

}  // namespace

json result_to_json(const ScenarioResult &result) {
  const auto &b = result.best;
  json traj = {{"value", json::array()},
               {"grad_norm", json::array()},
               {"best_value", json::array()},
               {"hard_value", json::array()}};
  for (const auto &t : b.trajectory) {
    traj["value"].push_back(t.value);
    traj["grad_norm"].push_back(t.grad_norm);
    traj["best_value"].push_back(t.best_value);
    traj["hard_value"].push_back(t.hard_value);
  }
  json restarts = json::array();
  for (const auto &r : result.restarts)
    restarts.push_back({{"seed", r.seed},
                        {"best_hard_value", r.best_hard_value},
                        {"final_soft_value", r.final_soft_value},
                        {"effective_n", r.effective_n},
                        {"iterations", r.iterations}});
  json doc;
  doc["config"] = config_to_json(result.config);
  doc["epsilon_absolute"] = result.config.epsilon();
  doc["policy"] = params_to_json(result.policy);
  doc["policy"]["value"] = result.policy_value;
  doc["policy"]["effective_n"] = result.effective_n;
  doc["policy"]["iteration"] = b.best_hard_iteration;
  doc["final"] = {{"seed_used", b.seed_used},
                  {"iterations", b.iterations},
                  {"converged", b.converged},
                  {"params", params_to_json(b.params)},
                  {"hard_value", b.hard_value},
                  {"effective_n", b.effective_n},
                  {"report", report_to_json(b.report)},
                  {"prune",
                   {{"removed", b.prune.removed},
                    {"value_before", b.prune.value_before},
                    {"value_after", b.prune.value_after},
                    {"bound", b.prune.bound},
                    {"within_bound", b.prune.within_bound}}},
                  {"trajectory", traj}};
  doc["restarts"] = restarts;
  if (result.benchmarks) {
    const auto &r = *result.benchmarks;
    doc["benchmarks"] = {{"r_opt", r.r_opt},
                         {"r_noinfo", r.r_noinfo},
                         {"r_lloyd", r.r_lloyd},
                         {"r_fullinfo", r.r_fullinfo},
                         {"pp", r.pp ? json(*r.pp) : json(nullptr)},
                         {"effective_n", r.effective_n},
                         {"lloyd_seed", r.lloyd_seed}};
  }
  return doc;
}

DiagramExport make_diagram(const DiagramParams &params, const GridMeasure &grid) {
  const auto assignment = hard_assign(params, grid);
  const auto stats = hard_cell_stats(assignment, grid);
  return {grid.bounds(), grid.resolution(), params, stats.masses, stats.barycenters, assignment.labels};
}

json diagram_to_json(const DiagramExport &d) {
  json bary = json::array();
  for (const auto &b : d.barycenters) bary.push_back(b ? to_json(*b) : json(nullptr));
  json sites = json::array();
  for (const auto &s : d.params.sites) sites.push_back(to_json(s));
  return {{"bounds", {{"lo", to_json(d.bounds.lo)}, {"hi", to_json(d.bounds.hi)}}},
          {"resolution", d.resolution},
          {"sites", sites},
          {"weights", d.params.weights},
          {"masses", d.masses},
          {"barycenters", bary},
          {"label_grid", d.label_grid}};
}

DiagramExport diagram_from_json(const json &doc) {
  DiagramExport d;
  d.bounds = {point(doc.at("bounds").at("lo"), "bounds.lo"), point(doc.at("bounds").at("hi"), "bounds.hi")};
  d.resolution = doc.at("resolution").get<int>();
  for (const auto &s : doc.at("sites")) d.params.sites.push_back(point(s, "sites"));
  d.params.weights = doc.at("weights").get<std::vector<double>>();
  d.masses = doc.at("masses").get<std::vector<double>>();
  for (const auto &b : doc.at("barycenters"))
    d.barycenters.push_back(b.is_null() ? std::nullopt : std::optional<Vec2>(point(b, "barycenters")));
  d.label_grid = doc.at("label_grid").get<std::vector<std::int32_t>>();
  const auto cells = static_cast<std::size_t>(d.resolution) * static_cast<std::size_t>(d.resolution);
  if (d.label_grid.size() != cells) throw ConfigError("label_grid", "size must be resolution^2");
  return d;
}

namespace {

std::string cell_color(std::size_t i) {
  static const char *palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d4a6c8"};
  const std::size_t k = std::size(palette);
  if (i < k) return palette[i];
  return fmt::format("hsl({},55%,60%)", (i * 137) % 360);
}

}  // namespace

std::string diagram_to_svg(const DiagramExport &d) {
  constexpr double plot = 480.0, panel = 200.0, pad = 10.0;
  const int m = d.resolution;
  const double px = plot / m;
  const double w = d.bounds.width(), h = d.bounds.height();
  auto sx = [&](double x) { return pad + (x - d.bounds.lo.x) / w * plot; };
  auto sy = [&](double y) { return pad + plot - (y - d.bounds.lo.y) / h * plot; };

  const std::size_t rows_in_panel = d.params.size();
  const double height = std::max(plot + 2 * pad, 40.0 + 18.0 * static_cast<double>(rows_in_panel));
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
      "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      plot + panel + 2 * pad, height, plot + panel + 2 * pad, height);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g shape-rendering=\"crispEdges\">\n";
  for (int row = 0; row < m; ++row) {
    int col = 0;
    while (col < m) {
      const auto label = d.label_grid[static_cast<std::size_t>(row) * m + col];
      int end = col + 1;
      while (end < m && d.label_grid[static_cast<std::size_t>(row) * m + end] == label) ++end;
      out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                         pad + col * px, pad + plot - (row + 1) * px, (end - col) * px, px,
                         cell_color(static_cast<std::size_t>(label)));
      col = end;
    }
  }
  out += "</g>\n";
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     pad, pad, plot, plot);
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    const Vec2 &s = d.params.sites[i];
    if (d.bounds.strictly_contains(s))
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"4\" fill=\"white\" stroke=\"black\"/>\n",
                         sx(s.x), sy(s.y));
    if (i < d.barycenters.size() && d.barycenters[i]) {
      const double bx = sx(d.barycenters[i]->x), by = sy(d.barycenters[i]->y);
      out += fmt::format(
          "<polygon points=\"{:.2f},{:.2f} {:.2f},{:.2f} {:.2f},{:.2f}\" fill=\"black\"/>\n", bx, by - 5.0,
          bx - 4.5, by + 3.5, bx + 4.5, by + 3.5);
    }
  }
  const double x0 = plot + 2 * pad + 10.0;
  out += fmt::format("<text x=\"{:.0f}\" y=\"24\" font-family=\"monospace\" font-size=\"13\">weights g</text>\n", x0);
  for (std::size_t i = 0; i < d.params.size(); ++i) {
    const double y = 44.0 + 18.0 * static_cast<double>(i);
    out += fmt::format("<rect x=\"{:.0f}\" y=\"{:.0f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", x0, y - 11.0,
                       cell_color(i));
    out += fmt::format(
        "<text x=\"{:.0f}\" y=\"{:.0f}\" font-family=\"monospace\" font-size=\"12\">{:>2}: {:+.5f}</text>\n",
        x0 + 18.0, y, i, d.params.weights[i]);
  }
  out += "</svg>\n";
  return out;
}

std::string dump_json(const json &doc) { return doc.dump(2) + "\n"; }

void write_file(const std::filesystem::path &path, const std::string &contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

void export_diagram(const DiagramParams &params, const GridMeasure &grid, const std::filesystem::path &dir) {
  const auto d = make_diagram(params, grid);
  write_file(dir / "diagram.json", diagram_to_json(d).dump() + "\n");
  write_file(dir / "diagram.svg", diagram_to_svg(d));
}

}  // namespace persuade
