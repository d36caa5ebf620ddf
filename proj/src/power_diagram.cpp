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
#include "persuade/power_diagram.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "persuade/random.hpp"

namespace persuade {

void DiagramParams::validate() const {
  if (sites.empty()) throw InvalidParams("diagram needs at least one site");
  if (sites.size() != weights.size())
    throw InvalidParams("diagram has " + std::to_string(sites.size()) + " sites but " +
                        std::to_string(weights.size()) + " weights");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!std::isfinite(sites[i].x) || !std::isfinite(sites[i].y) || !std::isfinite(weights[i]))
      throw InvalidParams("diagram parameter " + std::to_string(i) + " is not finite");
    for (std::size_t j = 0; j < i; ++j)
      if (sites[i] == sites[j])
        throw InvalidParams("sites " + std::to_string(j) + " and " + std::to_string(i) +
                            " coincide");
  }
}

void DiagramParams::normalize_weights() {
  if (weights.empty()) return;
  const double g0 = weights.front();
  for (double &g : weights) g -= g0;
}

DiagramParams DiagramParams::with_zero_weights(std::vector<Vec2> sites) {
  DiagramParams p;
  p.weights.assign(sites.size(), 0.0);
  p.sites = std::move(sites);
  return p;
}

std::size_t CellStats::occupied_count() const {
  return static_cast<std::size_t>(
      std::count_if(barycenters.begin(), barycenters.end(), [](auto &b) { return b.has_value(); }));
}

HardAssignment hard_assign(const DiagramParams &params, std::span<const Vec2> points) {
  params.validate();
  const std::size_t n = params.size();
  HardAssignment out;
  out.cells = n;
  out.labels.resize(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) {
    std::int32_t best = 0;
    double best_cost = power_cost(points[a], params.sites[0], params.weights[0]);
    for (std::size_t i = 1; i < n; ++i) {
      const double c = power_cost(points[a], params.sites[i], params.weights[i]);
      if (c < best_cost) {
        best_cost = c;
        best = static_cast<std::int32_t>(i);
      }
    }
    out.labels[a] = best;
  }
  return out;
}

CellStats hard_cell_stats(const HardAssignment &assignment, MeasureView measure) {
  const std::size_t n = assignment.cells;
  std::vector<CompensatedSum> m(n), sx(n), sy(n);
  for (std::size_t a = 0; a < measure.size(); ++a) {
    const auto i = static_cast<std::size_t>(assignment.labels[a]);
    const double w = measure.masses[a];
    m[i].add(w);
    sx[i].add(w * measure.points[a].x);
    sy[i].add(w * measure.points[a].y);
  }
  CellStats stats;
  stats.masses.resize(n);
  stats.barycenters.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    stats.masses[i] = m[i].value();
    if (stats.masses[i] > 0.0)
      stats.barycenters[i] = Vec2{sx[i].value() / stats.masses[i], sy[i].value() / stats.masses[i]};
  }
  return stats;
}

double hard_c_transform(const DiagramParams &params, const Vec2 &y) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i)
    best = std::min(best, power_cost(y, params.sites[i], params.weights[i]));
  return best;
}

double quantization_energy(const DiagramParams &params, const HardAssignment &assignment,
                           MeasureView measure) {
  CompensatedSum e;
  for (std::size_t a = 0; a < measure.size(); ++a)
    e.add(measure.masses[a] *
          squared_distance(measure.points[a], params.sites[assignment.labels[a]]));
  return e.value();
}

DiagramParams lloyd_step(const DiagramParams &params, const GridMeasure &grid) {
  auto voronoi = DiagramParams::with_zero_weights(params.sites);
  const auto stats = hard_cell_stats(hard_assign(voronoi, grid), grid);
  for (std::size_t i = 0; i < voronoi.size(); ++i)
    if (stats.barycenters[i]) voronoi.sites[i] = *stats.barycenters[i];
  return voronoi;
}

namespace {

std::vector<Vec2> sample_distinct_points(int n, const GridMeasure &grid, Rng &rng) {
  std::size_t support = 0;
  for (double m : grid.masses())
    if (m > 0.0) ++support;
  if (static_cast<std::size_t>(n) > support)
    throw InvalidParams("cannot place " + std::to_string(n) + " distinct sites on " +
                        std::to_string(support) + " grid points");
  DiscreteSampler sampler(grid.masses());
  std::vector<std::size_t> picked;
  while (picked.size() < static_cast<std::size_t>(n)) {
    const std::size_t a = sampler(rng);
    if (std::find(picked.begin(), picked.end(), a) == picked.end()) picked.push_back(a);
  }
  std::vector<Vec2> sites;
  sites.reserve(picked.size());
  for (std::size_t a : picked) sites.push_back(grid.centers()[a]);
  return sites;
}

// Heaviest point of `cell`, farthest from its site on ties, not already a site.
std::optional<Vec2> reseed_point(const DiagramParams &params, const HardAssignment &assignment,
                                 const GridMeasure &grid, std::size_t cell) {
  std::optional<std::size_t> best;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    if (static_cast<std::size_t>(assignment.labels[a]) != cell) continue;
    const Vec2 &y = grid.centers()[a];
    if (std::find(params.sites.begin(), params.sites.end(), y) != params.sites.end()) continue;
    if (!best) {
      best = a;
      continue;
    }
    const double mb = grid.masses()[*best], ma = grid.masses()[a];
    if (ma > mb || (ma == mb && squared_distance(y, params.sites[cell]) >
                                    squared_distance(grid.centers()[*best], params.sites[cell])))
      best = a;
  }
  if (!best) return std::nullopt;
  return grid.centers()[*best];
}

}  // namespace

LloydResult lloyd_solve(int n, const GridMeasure &grid, std::uint64_t seed, int max_iters,
                        double tol) {
  if (n < 1) throw InvalidParams("lloyd_solve needs n >= 1");
  Rng rng(seed);
  LloydResult result;
  result.seed = seed;
  result.params = DiagramParams::with_zero_weights(sample_distinct_points(n, grid, rng));

  for (int it = 0;; ++it) {
    const auto assignment = hard_assign(result.params, grid);
    result.stats = hard_cell_stats(assignment, grid);
    result.energies.push_back(quantization_energy(result.params, assignment, grid.view()));
    result.iterations = it;

    bool any_empty = false;
    double max_shift = 0.0;
    for (std::size_t i = 0; i < result.params.size(); ++i) {
      if (!result.stats.barycenters[i]) {
        any_empty = true;
        continue;
      }
      max_shift = std::max(max_shift, norm(result.params.sites[i] - *result.stats.barycenters[i]));
    }
    if (!any_empty && max_shift < tol) {
      result.converged = true;
      break;
    }
    if (it >= max_iters) break;

    auto next = result.params;
    for (std::size_t i = 0; i < next.size(); ++i)
      if (result.stats.barycenters[i]) next.sites[i] = *result.stats.barycenters[i];
    if (any_empty) {
      for (std::size_t i = 0; i < next.size(); ++i) {
        if (result.stats.barycenters[i]) continue;
        const auto largest = static_cast<std::size_t>(
            std::max_element(result.stats.masses.begin(), result.stats.masses.end()) -
            result.stats.masses.begin());
        if (auto p = reseed_point(next, assignment, grid, largest)) next.sites[i] = *p;
      }
    }
    result.params = std::move(next);
  }
  return result;
}

double mass_residual(std::span<const double> masses, std::span<const double> targets) {
  double r = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) r = std::max(r, std::abs(masses[i] - targets[i]));
  return r;
}

void validate_targets(std::span<const double> targets, std::size_t n) {
  if (targets.size() != n)
    throw InvalidParams("expected " + std::to_string(n) + " target masses, got " +
                        std::to_string(targets.size()));
  double total = 0.0;
  for (double t : targets) {
    if (!(t > 0.0)) throw InvalidParams("target masses must be positive");
    total += t;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InvalidParams("target masses must sum to 1");
}

namespace {

double hard_dual_value(const DiagramParams &params, const GridMeasure &grid,
                       std::span<const double> targets) {
  CompensatedSum d;
  for (std::size_t a = 0; a < grid.size(); ++a)
    d.add(grid.masses()[a] * hard_c_transform(params, grid.centers()[a]));
  for (std::size_t i = 0; i < params.size(); ++i) d.add(targets[i] * params.weights[i]);
  return d.value();
}

}  // namespace

std::vector<double> sd_dual_solve(std::span<const Vec2> sites,
                                  std::span<const double> target_masses, const GridMeasure &grid,
                                  double tol, const DualSolveOptions &options) {
  DiagramParams params = DiagramParams::with_zero_weights({sites.begin(), sites.end()});
  params.validate();
  validate_targets(target_masses, params.size());

  auto masses_of = [&](const DiagramParams &p) {
    return hard_cell_stats(hard_assign(p, grid), grid).masses;
  };

  const Rect &b = grid.bounds();
  double step = options.initial_step > 0.0
                    ? options.initial_step
                    : 0.25 * (b.width() * b.width() + b.height() * b.height());
  auto masses = masses_of(params);
  double value = hard_dual_value(params, grid, target_masses);
  double residual = mass_residual(masses, target_masses);

  // Ascent on the concave, piecewise linear dual: accept a gradient step when
  // it increases D, otherwise halve the step.
  int it = 0;
  for (; it < options.max_iters && residual >= tol; ++it) {
    DiagramParams trial = params;
    for (std::size_t i = 0; i < trial.size(); ++i)
      trial.weights[i] += step * (target_masses[i] - masses[i]);
    trial.normalize_weights();
    const double trial_value = hard_dual_value(trial, grid, target_masses);
    if (trial_value > value) {
      params = std::move(trial);
      value = trial_value;
      masses = masses_of(params);
      residual = mass_residual(masses, target_masses);
      step *= 1.25;
    } else {
      step *= 0.5;
      if (step < 1e-300) break;
    }
  }
  if (residual >= tol)
    throw ConvergenceFailure("sd_dual_solve: mass residual " + std::to_string(residual) +
                                 " above tolerance",
                             residual, it);
  params.normalize_weights();
  return params.weights;
}

}  // namespace persuade
