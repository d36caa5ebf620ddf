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
#include "persuade/entropic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <string>

namespace persuade {

void EntropicConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw InvalidParams("epsilon must be a positive finite number");
}

double soft_memberships(const DiagramParams &params, const Vec2 &y, double epsilon,
                        std::span<double> chi) {
  const std::size_t n = params.size();
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    chi[i] = power_cost(y, params.sites[i], params.weights[i]);
    min_cost = std::min(min_cost, chi[i]);
  }
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    chi[i] = std::exp((min_cost - chi[i]) / epsilon);
    z += chi[i];
  }
  for (std::size_t i = 0; i < n; ++i) chi[i] /= z;
  return -min_cost / epsilon + std::log(z);
}

SoftCellStats soft_cell_stats(const SoftPartition &partition, MeasureView measure) {
  const std::size_t n = partition.cells;
  std::vector<CompensatedSum> m(n), sx(n), sy(n);
  for (std::size_t a = 0; a < partition.points; ++a) {
    const double w = measure.masses[a];
    const Vec2 &y = measure.points[a];
    const double *row = partition.chi.data() + a * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double wc = w * row[i];
      m[i].add(wc);
      sx[i].add(wc * y.x);
      sy[i].add(wc * y.y);
    }
  }
  SoftCellStats stats;
  stats.masses.resize(n);
  stats.moments.resize(n);
  stats.barycenters.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    stats.masses[i] = m[i].value();
    stats.moments[i] = {sx[i].value(), sy[i].value()};
    stats.barycenters[i] = stats.masses[i] > 0.0 ? stats.moments[i] / stats.masses[i]
                                                 : Vec2{std::nan(""), std::nan("")};
  }
  return stats;
}

SoftResult soft_partition(const DiagramParams &params, MeasureView measure,
                          const EntropicConfig &cfg) {
  cfg.validate();
  params.validate();
  const std::size_t n = params.size();
  SoftResult out;
  auto &part = out.partition;
  part.cells = n;
  part.points = measure.size();
  part.chi.resize(n * part.points);
  part.logits.resize(n * part.points);
  for (std::size_t a = 0; a < part.points; ++a) {
    const Vec2 &y = measure.points[a];
    for (std::size_t i = 0; i < n; ++i)
      part.logits[a * n + i] = -power_cost(y, params.sites[i], params.weights[i]) / cfg.epsilon;
    soft_memberships(params, y, cfg.epsilon, {part.chi.data() + a * n, n});
  }
  out.stats = soft_cell_stats(part, measure);
  return out;
}

double c_transform(const DiagramParams &params, const Vec2 &y, const EntropicConfig &cfg,
                   double density_value) {
  cfg.validate();
  if (!(density_value > 0.0)) throw InvalidParams("c_transform needs a positive density value");
  double min_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < params.size(); ++i)
    min_cost = std::min(min_cost, power_cost(y, params.sites[i], params.weights[i]));
  double z = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i)
    z += std::exp((min_cost - power_cost(y, params.sites[i], params.weights[i])) / cfg.epsilon);
  return cfg.epsilon * std::log(density_value) + min_cost - cfg.epsilon * std::log(z);
}

double dual_value(const DiagramParams &params, const GridMeasure &grid,
                  std::span<const double> target_masses, const EntropicConfig &cfg) {
  cfg.validate();
  const double area = grid.cell_area();
  CompensatedSum d;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double w = grid.masses()[a];
    if (w <= 0.0) continue;
    d.add(w * c_transform(params, grid.centers()[a], cfg, w / area));
  }
  for (std::size_t i = 0; i < params.size(); ++i) d.add(params.weights[i] * target_masses[i]);
  d.add(-cfg.epsilon);
  return d.value();
}

SinkhornResult sinkhorn_dual_solve(std::span<const Vec2> sites,
                                   std::span<const double> target_masses,
                                   const GridMeasure &grid, const EntropicConfig &cfg,
                                   double tol, const SinkhornOptions &options) {
  cfg.validate();
  DiagramParams params = DiagramParams::with_zero_weights({sites.begin(), sites.end()});
  params.validate();
  validate_targets(target_masses, params.size());
  const std::size_t n = params.size();
  const double eps = cfg.epsilon;

  SinkhornResult result;
  std::vector<double> chi(n);

  // Masses and the reduced Hessian (1/eps)(diag(m) - sum nu chi chi^T),
  // restricted to indices 1..n-1.
  auto evaluate = [&](const DiagramParams &p, std::vector<double> &masses, Eigen::MatrixXd *hess) {
    std::vector<CompensatedSum> m(n);
    if (hess) hess->setZero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const double w = grid.masses()[a];
      soft_memberships(p, grid.centers()[a], eps, chi);
      for (std::size_t i = 0; i < n; ++i) m[i].add(w * chi[i]);
      if (hess)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t k = 0; k <= i; ++k) (*hess)(i, k) -= w * chi[i] * chi[k];
    }
    masses.resize(n);
    for (std::size_t i = 0; i < n; ++i) masses[i] = m[i].value();
    if (hess) {
      for (std::size_t i = 0; i < n; ++i) {
        (*hess)(i, i) += masses[i];
        for (std::size_t k = 0; k < i; ++k) (*hess)(k, i) = (*hess)(i, k);
      }
      *hess /= eps;
    }
  };

  std::vector<double> masses;
  Eigen::MatrixXd hess;
  evaluate(params, masses, n > 1 ? &hess : nullptr);
  result.residual = mass_residual(masses, target_masses);
  double value = dual_value(params, grid, target_masses, cfg);

  int it = 0;
  for (; it < options.max_iters && result.residual >= tol; ++it) {
    const auto r = static_cast<Eigen::Index>(n - 1);
    Eigen::VectorXd grad(r);
    for (Eigen::Index i = 0; i < r; ++i) grad(i) = target_masses[i + 1] - masses[i + 1];
    Eigen::MatrixXd reduced = hess.bottomRightCorner(r, r);
    reduced.diagonal().array() += 1e-12 * (1.0 + reduced.diagonal().array().abs());
    Eigen::VectorXd dir = reduced.ldlt().solve(grad);
    if (!dir.allFinite()) dir = grad;

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      DiagramParams trial = params;
      for (Eigen::Index i = 0; i < r; ++i) trial.weights[i + 1] += t * dir(i);
      const double trial_value = dual_value(trial, grid, target_masses, cfg);
      if (trial_value >= value + 1e-4 * t * grad.dot(dir) || ls == 59) {
        params = std::move(trial);
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    evaluate(params, masses, &hess);
    result.residual = mass_residual(masses, target_masses);
  }
  result.iterations = it;
  if (result.residual >= tol)
    throw ConvergenceFailure("sinkhorn_dual_solve: mass residual " +
                                 std::to_string(result.residual) + " above tolerance",
                             result.residual, it);
  params.normalize_weights();
  result.weights = params.weights;
  return result;
}

void membership_derivatives(const DiagramParams &params, const Vec2 &y,
                            std::span<const double> chi, double epsilon,
                            std::span<double> d_weight, std::span<Vec2> d_site) {
  const std::size_t n = params.size();
  const double inv_eps = 1.0 / epsilon;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double core = (chi[j] - (j == k ? 1.0 : 0.0)) * chi[k];
      d_weight[j * n + k] = -inv_eps * core;
      d_site[j * n + k] = (params.sites[k] - y) * (2.0 * inv_eps * core);
    }
  }
}

SoftPartitionGrads soft_partition_grads(const DiagramParams &params, MeasureView measure,
                                        const EntropicConfig &cfg) {
  const auto soft = soft_partition(params, measure, cfg);
  const std::size_t n = params.size();
  SoftPartitionGrads g;
  g.cells = n;
  g.points = measure.size();
  g.d_weight.resize(g.points * n * n);
  g.d_site.resize(g.points * n * n);
  for (std::size_t a = 0; a < g.points; ++a)
    membership_derivatives(params, measure.points[a], soft.partition.row(a), cfg.epsilon,
                           {g.d_weight.data() + a * n * n, n * n},
                           {g.d_site.data() + a * n * n, n * n});
  return g;
}

double soft_hard_gap(const SoftPartition &soft, const HardAssignment &hard, MeasureView measure,
                     std::size_t cell) {
  CompensatedSum s;
  for (std::size_t a = 0; a < soft.points; ++a) {
    const double indicator = static_cast<std::size_t>(hard.labels[a]) == cell ? 1.0 : 0.0;
    s.add(measure.masses[a] * std::abs(soft(cell, a) - indicator));
  }
  return s.value();
}

double soft_hard_gap(const SoftPartition &soft, const HardAssignment &hard, MeasureView measure) {
  double total = 0.0;
  for (std::size_t i = 0; i < soft.cells; ++i) total += soft_hard_gap(soft, hard, measure, i);
  return total;
}

}  // namespace persuade
