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

// Entropy-regularized soft Laguerre partitions.
//
// For sites x_i, weights g_i and blur eps > 0 the soft membership of a point y
// in cell i is the softmax
//
//   chi_i(y) = exp(s_i(y)) / sum_j exp(s_j(y)),   s_i(y) = (g_i - |y - x_i|^2) / eps,
//
// which is minus the g_i-derivative of the softmin C-transform
//
//   g^{C,eps}(y) = eps log(dnu/dL)(y) - eps log sum_j exp(s_j(y)).
//
// Soft masses and barycenters integrate chi against the prior; as eps -> 0
// they converge to the hard Laguerre cell quantities.

#include <span>
#include <vector>

#include "persuade/grid_measure.hpp"
#include "persuade/power_diagram.hpp"

namespace persuade {

struct EntropicConfig {
  double epsilon = 1e-2;  // squared-distance units

  void validate() const;
};

/// Dense soft memberships, stored point-major: entry (i, a) at a * cells + i.
struct SoftPartition {
  std::size_t cells = 0;
  std::size_t points = 0;
  std::vector<double> chi;
  std::vector<double> logits;  // s_i(y_a), not max-shifted

  double operator()(std::size_t i, std::size_t a) const { return chi[a * cells + i]; }
  std::span<const double> row(std::size_t a) const { return {chi.data() + a * cells, cells}; }
};

struct SoftCellStats {
  std::vector<double> masses;
  std::vector<Vec2> barycenters;
  /// Unnormalized first moments sum_a nu_a chi_ia y_a.
  std::vector<Vec2> moments;

  std::size_t size() const { return masses.size(); }
};

struct SoftResult {
  SoftPartition partition;
  SoftCellStats stats;
};

/// Writes softmax memberships of one point into `chi` (size n) and returns
/// log-sum-exp of the exponents. Max-subtracted, so safe for tiny eps.
double soft_memberships(const DiagramParams &params, const Vec2 &y, double epsilon,
                        std::span<double> chi);

SoftResult soft_partition(const DiagramParams &params, MeasureView measure,
                          const EntropicConfig &cfg);
inline SoftResult soft_partition(const DiagramParams &params, const GridMeasure &grid,
                                 const EntropicConfig &cfg) {
  return soft_partition(params, grid.view(), cfg);
}

/// Masses, moments and barycenters of a soft partition. Summation runs over
/// points in index order.
SoftCellStats soft_cell_stats(const SoftPartition &partition, MeasureView measure);

/// Softmin C-transform at a point with prior density value `density_value`.
double c_transform(const DiagramParams &params, const Vec2 &y, const EntropicConfig &cfg,
                   double density_value);

/// Regularized semi-discrete dual D^eps[g] = int g^{C,eps} dnu + g.m - eps on
/// the grid, with grid density nu_a / cell_area.
double dual_value(const DiagramParams &params, const GridMeasure &grid,
                  std::span<const double> target_masses, const EntropicConfig &cfg);

struct SinkhornOptions {
  int max_iters = 200;
};

struct SinkhornResult {
  std::vector<double> weights;  // weights[0] == 0
  double residual = 0.0;
  int iterations = 0;
};

/// Maximizes D^eps over g for fixed sites until max_i |m_i^eps - target_i| <
/// tol. Damped Newton ascent on the reduced (g_0 = 0) system with a
/// backtracking line search on D^eps. Throws ConvergenceFailure when the
/// iteration budget runs out.
SinkhornResult sinkhorn_dual_solve(std::span<const Vec2> sites,
                                   std::span<const double> target_masses,
                                   const GridMeasure &grid, const EntropicConfig &cfg,
                                   double tol, const SinkhornOptions &options = {});

/// Per-point derivatives of the memberships. For point a, output j, input k:
///   d chi_j / d g_k = -(1/eps) (chi_j - delta_kj) chi_k
///   d chi_j / d x_k =  (2 (x_k - y_a) / eps) (chi_j - delta_kj) chi_k
/// Layout: (a * n + j) * n + k.
struct SoftPartitionGrads {
  std::size_t cells = 0;
  std::size_t points = 0;
  std::vector<double> d_weight;
  std::vector<Vec2> d_site;

  double dg(std::size_t a, std::size_t j, std::size_t k) const {
    return d_weight[(a * cells + j) * cells + k];
  }
  const Vec2 &dx(std::size_t a, std::size_t j, std::size_t k) const {
    return d_site[(a * cells + j) * cells + k];
  }
};

/// Fills n x n blocks for a single point from its membership row.
void membership_derivatives(const DiagramParams &params, const Vec2 &y,
                            std::span<const double> chi, double epsilon,
                            std::span<double> d_weight, std::span<Vec2> d_site);

/// Dense derivative tensors over all points; memory is 3 n^2 doubles per
/// point, meant for verification and small problems.
SoftPartitionGrads soft_partition_grads(const DiagramParams &params, MeasureView measure,
                                        const EntropicConfig &cfg);
inline SoftPartitionGrads soft_partition_grads(const DiagramParams &params,
                                               const GridMeasure &grid,
                                               const EntropicConfig &cfg) {
  return soft_partition_grads(params, grid.view(), cfg);
}

/// nu-weighted L1 distance between soft and hard memberships of cell `cell`.
double soft_hard_gap(const SoftPartition &soft, const HardAssignment &hard, MeasureView measure,
                     std::size_t cell);
/// Same, summed over all cells.
double soft_hard_gap(const SoftPartition &soft, const HardAssignment &hard, MeasureView measure);

}  // namespace persuade
