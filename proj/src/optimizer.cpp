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
#include "persuade/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "persuade/random.hpp"

namespace persuade {

void OptimizerConfig::validate() const {
  if (n_init < 1) throw InvalidParams("n_init must be >= 1");
  if (max_iters < 0) throw InvalidParams("max_iters must be >= 0");
  if (!(learning_rate > 0.0)) throw InvalidParams("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0)) throw InvalidParams("adam_beta1 must be in [0, 1)");
  if (!(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) throw InvalidParams("adam_beta2 must be in [0, 1)");
  if (!(adam_eps > 0.0)) throw InvalidParams("adam_eps must be positive");
  if (grad_mode == GradMode::monte_carlo && batch_size < 1)
    throw InvalidParams("batch_size must be >= 1 for monte-carlo gradients");
  if (!(prune_mass_tol >= 0.0)) throw InvalidParams("prune_mass_tol must be >= 0");
  if (!(stop_grad_tol >= 0.0)) throw InvalidParams("stop_grad_tol must be >= 0");
  if (annealing.enabled && !(annealing.start_epsilon > 0.0 && annealing.decay > 0.0 &&
                             annealing.decay <= 1.0))
    throw InvalidParams("annealing needs start_epsilon > 0 and decay in (0, 1]");
}

DiagramParams init_sites(int n, const GridMeasure &grid, std::uint64_t seed,
                         InitStrategy strategy) {
  if (n < 1) throw InvalidParams("init_sites needs n >= 1");
  Rng rng(seed);
  const Rect &box = grid.bounds();
  std::vector<Vec2> sites;
  sites.reserve(static_cast<std::size_t>(n));
  if (strategy == InitStrategy::uniform_random) {
    while (sites.size() < static_cast<std::size_t>(n)) {
      const Vec2 s{rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
      if (std::find(sites.begin(), sites.end(), s) == sites.end()) sites.push_back(s);
    }
  } else {
    const int k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<int> slots(static_cast<std::size_t>(k * k));
    std::iota(slots.begin(), slots.end(), 0);
    // Partial Fisher-Yates: the first n slots are a uniform random subset.
    for (int i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(slots.size() - static_cast<std::size_t>(i));
      std::swap(slots[static_cast<std::size_t>(i)], slots[j]);
    }
    std::sort(slots.begin(), slots.begin() + n);
    const Vec2 step{box.width() / k, box.height() / k};
    for (int i = 0; i < n; ++i) {
      const int col = slots[static_cast<std::size_t>(i)] % k;
      const int row = slots[static_cast<std::size_t>(i)] / k;
      const Vec2 jitter{rng.uniform(-0.25, 0.25) * step.x, rng.uniform(-0.25, 0.25) * step.y};
      sites.push_back(Vec2{box.lo.x + (col + 0.5) * step.x, box.lo.y + (row + 0.5) * step.y} +
                      jitter);
    }
  }
  return DiagramParams::with_zero_weights(std::move(sites));
}

DiagramParams prune_cells(const DiagramParams &params, const SoftCellStats &soft,
                          const CellStats &hard, double mass_tol) {
  DiagramParams out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (soft.masses[i] < mass_tol && !(hard.masses[i] > 0.0)) continue;
    out.sites.push_back(params.sites[i]);
    out.weights.push_back(params.weights[i]);
  }
  if (out.sites.empty()) {
    const auto keep = static_cast<std::size_t>(
        std::max_element(soft.masses.begin(), soft.masses.end()) - soft.masses.begin());
    out.sites.push_back(params.sites[keep]);
    out.weights.push_back(params.weights[keep]);
  }
  return out;
}

DiagramParams prune_cells(const DiagramParams &params, const GridMeasure &grid,
                          const EntropicConfig &cfg, double mass_tol) {
  const auto soft = soft_partition(params, grid, cfg);
  const auto hard = hard_cell_stats(hard_assign(params, grid), grid);
  return prune_cells(params, soft.stats, hard, mass_tol);
}

ObjectiveGradient mc_gradient(const DiagramParams &params, const GridMeasure &grid,
                              const ObjectiveConfig &cfg, std::uint64_t sampler_seed, int batch) {
  if (batch < 1) throw InvalidParams("mc_gradient needs batch >= 1");
  const DiscreteSampler sampler(grid.masses());
  Rng rng(sampler_seed);
  std::vector<Vec2> points(static_cast<std::size_t>(batch));
  for (auto &p : points) p = grid.centers()[sampler(rng)];
  const std::vector<double> masses(points.size(), 1.0 / batch);
  return objective_gradient(params, MeasureView{points, masses}, cfg);
}

namespace {

bool finite(const ObjectiveGradient &g) {
  if (!std::isfinite(g.report.value)) return false;
  for (const auto &d : g.d_sites)
    if (!std::isfinite(d.x) || !std::isfinite(d.y)) return false;
  for (double d : g.d_weights)
    if (!std::isfinite(d)) return false;
  return true;
}

int occupied_cells(const DiagramParams &params, const GridMeasure &grid) {
  return static_cast<int>(hard_cell_stats(hard_assign(params, grid), grid).occupied_count());
}

double max_abs_payoff(const GridMeasure &grid, const PayoffModel &payoff) {
  double m = 0.0;
  for (const auto &y : grid.centers()) m = std::max(m, std::abs(payoff.eval(y)));
  return m;
}

}  // namespace

OptResult optimize(const DiagramParams &init, const GridMeasure &grid, const ObjectiveConfig &obj,
                   const OptimizerConfig &opt) {
  obj.validate();
  opt.validate();
  init.validate();

  DiagramParams params = init;
  const std::size_t n = params.size();
  const std::size_t dim = 3 * n;
  std::vector<double> m1(dim, 0.0), m2(dim, 0.0), grad(dim);
  Rng mc_seeds(opt.seed ^ 0x9e3779b97f4a7c15ULL);

  OptResult result;
  result.seed_used = opt.seed;
  result.best_hard_value = -std::numeric_limits<double>::infinity();
  double best_value = -std::numeric_limits<double>::infinity();
  ObjectiveConfig cfg = obj;

  int it = 0;
  for (;; ++it) {
    if (opt.annealing.enabled)
      cfg.entropic.epsilon = std::max(
          obj.entropic.epsilon, opt.annealing.start_epsilon * std::pow(opt.annealing.decay, it));

    ObjectiveGradient g;
    try {
      g = opt.grad_mode == GradMode::monte_carlo
              ? mc_gradient(params, grid, cfg, mc_seeds.next(), opt.batch_size)
              : objective_gradient(params, grid, cfg);
    } catch (const InvalidParams &e) {
      throw NumericFailure(std::string("optimize: invalid iterate: ") + e.what(), params, it);
    }
    if (!finite(g))
      throw NumericFailure("optimize: objective became non-finite at iteration " +
                               std::to_string(it),
                           params, it);

    const double hard = hard_objective(params, grid, cfg.payoff);
    if (hard > result.best_hard_value) {
      result.best_hard_value = hard;
      result.best_hard_params = params;
      result.best_hard_iteration = it;
    }
    best_value = std::max(best_value, g.report.value);
    const double gnorm = g.norm();
    result.trajectory.push_back({g.report.value, gnorm, best_value, hard});

    if (gnorm < opt.stop_grad_tol) {
      result.converged = true;
      break;
    }
    if (it == opt.max_iters) break;

    for (std::size_t i = 0; i < n; ++i) {
      grad[2 * i] = g.d_sites[i].x;
      grad[2 * i + 1] = g.d_sites[i].y;
      grad[2 * n + i] = g.d_weights[i];
    }
    const double t = it + 1.0;
    const double c1 = 1.0 - std::pow(opt.adam_beta1, t);
    const double c2 = 1.0 - std::pow(opt.adam_beta2, t);
    DiagramParams next = params;
    for (std::size_t k = 0; k < dim; ++k) {
      m1[k] = opt.adam_beta1 * m1[k] + (1.0 - opt.adam_beta1) * grad[k];
      m2[k] = opt.adam_beta2 * m2[k] + (1.0 - opt.adam_beta2) * grad[k] * grad[k];
      const double step = opt.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + opt.adam_eps);
      if (k < 2 * n) {
        auto &s = next.sites[k / 2];
        (k % 2 == 0 ? s.x : s.y) += step;
      } else {
        next.weights[k - 2 * n] += step;
      }
    }
    params = std::move(next);
  }
  result.iterations = it;

  // Finalization on the full grid at the target blur.
  ObjectiveConfig final_cfg = obj;
  const auto before = soft_objective(params, grid, final_cfg);
  const auto soft = soft_partition(params, grid, final_cfg.entropic);
  const auto hard_stats = hard_cell_stats(hard_assign(params, grid), grid);
  DiagramParams pruned = prune_cells(params, soft.stats, hard_stats, opt.prune_mass_tol);

  result.prune.removed = static_cast<int>(params.size() - pruned.size());
  result.prune.value_before = before.value;
  result.report = soft_objective(pruned, grid, final_cfg);
  result.prune.value_after = result.report.value;
  if (result.prune.removed > 0) {
    double removed_mass = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i)
      if (soft.stats.masses[i] < opt.prune_mass_tol && !(hard_stats.masses[i] > 0.0))
        removed_mass += soft.stats.masses[i];
    result.prune.bound =
        removed_mass * max_abs_payoff(grid, obj.payoff) +
        final_cfg.eta * std::abs(result.report.penalty_term - before.penalty_term);
  }
  result.prune.within_bound =
      std::abs(result.prune.value_after - result.prune.value_before) <= result.prune.bound + 1e-12;

  result.params = std::move(pruned);
  result.hard_value = hard_objective(result.params, grid, obj.payoff);
  result.effective_n = occupied_cells(result.params, grid);
  return result;
}

}  // namespace persuade
