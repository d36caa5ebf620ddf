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
#include "persuade/objective.hpp"

#include <string>

namespace persuade {

void ObjectiveConfig::validate() const {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidParams("eta must be >= 0");
  entropic.validate();
}

double ObjectiveGradient::norm() const {
  double s = 0.0;
  for (const auto &d : d_sites) s += squared_norm(d);
  for (double d : d_weights) s += d * d;
  return std::sqrt(s);
}

double hard_objective(const CellStats &stats, const PayoffModel &payoff) {
  CompensatedSum f;
  for (std::size_t i = 0; i < stats.size(); ++i)
    if (stats.masses[i] > 0.0 && stats.barycenters[i])
      f.add(stats.masses[i] * payoff.eval(*stats.barycenters[i]));
  return f.value();
}

double hard_objective(const DiagramParams &params, MeasureView measure, const PayoffModel &payoff) {
  return hard_objective(hard_cell_stats(hard_assign(params, measure.points), measure), payoff);
}

namespace {

void require_separated_sites(const DiagramParams &params) {
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (params.sites[i] == params.sites[j])
        throw SingularPenalty("penalty is singular: sites " + std::to_string(j) + " and " +
                              std::to_string(i) + " coincide");
}

double quantization_term(const DiagramParams &params, const SoftPartition &part,
                         MeasureView measure) {
  const std::size_t n = params.size();
  CompensatedSum q;
  for (std::size_t a = 0; a < part.points; ++a) {
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      row += squared_distance(measure.points[a], params.sites[i]) * part.chi[a * n + i];
    q.add(measure.masses[a] * row);
  }
  return q.value();
}

double repulsion_term(const DiagramParams &params, const std::vector<double> &masses) {
  double p = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i)
    for (std::size_t j = 0; j < params.size(); ++j)
      if (i != j) p += masses[i] * masses[j] / squared_distance(params.sites[i], params.sites[j]);
  return p;
}

ObjectiveReport make_report(const DiagramParams &params, const SoftResult &soft,
                            MeasureView measure, const ObjectiveConfig &cfg) {
  ObjectiveReport r;
  const std::size_t n = params.size();
  r.per_cell.resize(n);
  CompensatedSum f;
  for (std::size_t i = 0; i < n; ++i) {
    auto &c = r.per_cell[i];
    c.mass = soft.stats.masses[i];
    c.barycenter = soft.stats.barycenters[i];
    c.phi = c.mass > 0.0 ? cfg.payoff.eval(c.barycenter) : 0.0;
    if (c.mass > 0.0) f.add(c.mass * c.phi);
  }
  r.payoff_term = f.value();
  r.quantization_term = quantization_term(params, soft.partition, measure);
  r.repulsion_term = repulsion_term(params, soft.stats.masses);
  r.penalty_term = r.quantization_term + r.repulsion_term;
  r.value = r.payoff_term - cfg.eta * r.penalty_term;
  return r;
}

}  // namespace

double penalty_value(const DiagramParams &params, MeasureView measure, const EntropicConfig &cfg) {
  require_separated_sites(params);
  const auto soft = soft_partition(params, measure, cfg);
  return quantization_term(params, soft.partition, measure) +
         repulsion_term(params, soft.stats.masses);
}

ObjectiveReport soft_objective(const DiagramParams &params, MeasureView measure,
                               const ObjectiveConfig &cfg) {
  cfg.validate();
  require_separated_sites(params);
  const auto soft = soft_partition(params, measure, cfg.entropic);
  return make_report(params, soft, measure, cfg);
}

ObjectiveGradient objective_gradient(const DiagramParams &params, MeasureView measure,
                                     const ObjectiveConfig &cfg) {
  cfg.validate();
  require_separated_sites(params);
  const std::size_t n = params.size();
  const double eps = cfg.entropic.epsilon;
  const double eta = cfg.eta;
  const auto soft = soft_partition(params, measure, cfg.entropic);
  const auto &stats = soft.stats;

  ObjectiveGradient out;
  out.report = make_report(params, soft, measure, cfg);

  // Per-cell coefficients of the membership sensitivity
  //   dF/dchi_ja = nu_a [ Phi_j + gradPhi_j . (y_a - b_j) - eta (|y_a - x_j|^2 + dP/dm_j) ].
  std::vector<double> phi(n), dp_dm(n, 0.0);
  std::vector<Vec2> gphi(n);
  for (std::size_t j = 0; j < n; ++j) {
    phi[j] = out.report.per_cell[j].phi;
    gphi[j] = stats.masses[j] > 0.0 ? cfg.payoff.grad(stats.barycenters[j]) : Vec2{};
    for (std::size_t i = 0; i < n; ++i)
      if (i != j)
        dp_dm[j] += 2.0 * stats.masses[i] / squared_distance(params.sites[i], params.sites[j]);
  }
  std::vector<double> cell_const(n);
  for (std::size_t j = 0; j < n; ++j)
    cell_const[j] = (stats.masses[j] > 0.0 ? phi[j] - dot(gphi[j], stats.barycenters[j]) : 0.0) -
                    eta * dp_dm[j];

  std::vector<CompensatedSum> dgk(n), dxk_x(n), dxk_y(n);
  std::vector<double> adj(n);
  for (std::size_t a = 0; a < measure.size(); ++a) {
    const double w = measure.masses[a];
    if (w == 0.0) continue;
    const Vec2 &y = measure.points[a];
    const double *chi = soft.partition.chi.data() + a * n;
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      adj[j] = cell_const[j] + dot(gphi[j], y);
      if (eta != 0.0) adj[j] -= eta * squared_distance(y, params.sites[j]);
      mean += chi[j] * adj[j];
    }
    for (std::size_t k = 0; k < n; ++k) {
      // dF/ds_k with s_k = (g_k - |y - x_k|^2) / eps.
      const double ds = w * chi[k] * (adj[k] - mean);
      dgk[k].add(ds / eps);
      Vec2 dx = (y - params.sites[k]) * (2.0 * ds / eps);
      // Explicit site dependence of the quantization term.
      if (eta != 0.0) dx -= (params.sites[k] - y) * (2.0 * eta * w * chi[k]);
      dxk_x[k].add(dx.x);
      dxk_y[k].add(dx.y);
    }
  }

  out.d_sites.resize(n);
  out.d_weights.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.d_weights[k] = dgk[k].value();
    Vec2 dx{dxk_x[k].value(), dxk_y[k].value()};
    // Explicit site dependence of the repulsion term.
    if (eta != 0.0)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == k) continue;
        const Vec2 d = params.sites[k] - params.sites[j];
        const double d2 = squared_norm(d);
        dx += d * (4.0 * eta * stats.masses[k] * stats.masses[j] / (d2 * d2));
      }
    out.d_sites[k] = dx;
  }
  return out;
}

ObjectiveGradient objective_gradient_forward(const DiagramParams &params, MeasureView measure,
                                             const ObjectiveConfig &cfg) {
  cfg.validate();
  require_separated_sites(params);
  const std::size_t n = params.size();
  const double eps = cfg.entropic.epsilon;
  const auto soft = soft_partition(params, measure, cfg.entropic);
  const auto &stats = soft.stats;

  // Accumulators indexed [j * n + k]: derivative of cell j's quantity with
  // respect to parameter k.
  std::vector<double> dm_g(n * n, 0.0);
  std::vector<Vec2> dS_g(n * n), dm_x(n * n), dSx_x(n * n), dSy_x(n * n);
  std::vector<double> dQ_g(n, 0.0);
  std::vector<Vec2> dQ_x(n);

  std::vector<double> dW(n * n);
  std::vector<Vec2> dX(n * n);
  for (std::size_t a = 0; a < measure.size(); ++a) {
    const double w = measure.masses[a];
    const Vec2 &y = measure.points[a];
    const auto chi = soft.partition.row(a);
    membership_derivatives(params, y, chi, eps, dW, dX);
    for (std::size_t j = 0; j < n; ++j) {
      const double cost = squared_distance(y, params.sites[j]);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t jk = j * n + k;
        dm_g[jk] += w * dW[jk];
        dS_g[jk] += y * (w * dW[jk]);
        dm_x[jk] += dX[jk] * w;
        dSx_x[jk] += dX[jk] * (w * y.x);
        dSy_x[jk] += dX[jk] * (w * y.y);
        dQ_g[k] += w * cost * dW[jk];
        dQ_x[k] += dX[jk] * (w * cost);
      }
    }
    for (std::size_t k = 0; k < n; ++k) dQ_x[k] += (params.sites[k] - y) * (2.0 * w * chi[k]);
  }

  ObjectiveGradient out;
  out.report = make_report(params, soft, measure, cfg);
  out.d_sites.assign(n, Vec2{});
  out.d_weights.assign(n, 0.0);

  std::vector<double> phi(n);
  std::vector<Vec2> gphi(n);
  for (std::size_t j = 0; j < n; ++j) {
    phi[j] = out.report.per_cell[j].phi;
    gphi[j] = stats.masses[j] > 0.0 ? cfg.payoff.grad(stats.barycenters[j]) : Vec2{};
  }
  auto inv_d2 = [&](std::size_t i, std::size_t j) {
    return 1.0 / squared_distance(params.sites[i], params.sites[j]);
  };

  for (std::size_t k = 0; k < n; ++k) {
    double dF_g = 0.0;
    Vec2 dF_x;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jk = j * n + k;
      const double m = stats.masses[j];
      if (!(m > 0.0)) continue;
      const Vec2 &b = stats.barycenters[j];
      // d b_j / d g_k
      const Vec2 db_g = (dS_g[jk] - b * dm_g[jk]) / m;
      dF_g += dm_g[jk] * phi[j] + m * dot(gphi[j], db_g);
      // d b_j / d x_k: columns for the two components of x_k.
      const Vec2 db_dxk_x = (Vec2{dSx_x[jk].x, dSy_x[jk].x} - b * dm_x[jk].x) / m;
      const Vec2 db_dxk_y = (Vec2{dSx_x[jk].y, dSy_x[jk].y} - b * dm_x[jk].y) / m;
      dF_x += dm_x[jk] * phi[j] + Vec2{dot(gphi[j], db_dxk_x), dot(gphi[j], db_dxk_y)} * m;
    }

    double dR_g = dQ_g[k];
    Vec2 dR_x = dQ_x[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double c = inv_d2(i, j);
        const std::size_t ik = i * n + k, jk = j * n + k;
        dR_g += (dm_g[ik] * stats.masses[j] + stats.masses[i] * dm_g[jk]) * c;
        dR_x += (dm_x[ik] * stats.masses[j] + dm_x[jk] * stats.masses[i]) * c;
        const double mm = stats.masses[i] * stats.masses[j] * c * c;
        if (i == k) dR_x -= (params.sites[i] - params.sites[j]) * (2.0 * mm);
        if (j == k) dR_x -= (params.sites[j] - params.sites[i]) * (2.0 * mm);
      }
    }
    out.d_weights[k] = dF_g - cfg.eta * dR_g;
    out.d_sites[k] = dF_x - dR_x * cfg.eta;
  }
  return out;
}

}  // namespace persuade
