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

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "persuade/core.hpp"
#include "persuade/grid_measure.hpp"

namespace persuade {

/// Sites and weights of a Laguerre (power) diagram. Cell i is
/// { y : |y - x_i|^2 - g_i <= |y - x_j|^2 - g_j for all j }.
struct DiagramParams {
  std::vector<Vec2> sites;
  std::vector<double> weights;

  std::size_t size() const { return sites.size(); }

  /// Throws InvalidParams on empty input, size mismatch, non-finite values
  /// or coincident sites.
  void validate() const;

  /// Shifts weights so that g_0 == 0. Leaves the diagram unchanged.
  void normalize_weights();

  static DiagramParams with_zero_weights(std::vector<Vec2> sites);
};

/// Power cost |y - x_i|^2 - g_i.
inline double power_cost(const Vec2 &y, const Vec2 &site, double weight) {
  return squared_distance(y, site) - weight;
}

struct HardAssignment {
  /// Zero-based cell index per measure point, lowest index on ties.
  std::vector<std::int32_t> labels;
  std::size_t cells = 0;
};

struct CellStats {
  std::vector<double> masses;
  /// Empty where the cell carries no mass.
  std::vector<std::optional<Vec2>> barycenters;

  std::size_t size() const { return masses.size(); }
  bool occupied(std::size_t i) const { return barycenters[i].has_value(); }
  std::size_t occupied_count() const;
};

HardAssignment hard_assign(const DiagramParams &params, std::span<const Vec2> points);
inline HardAssignment hard_assign(const DiagramParams &params, const GridMeasure &grid) {
  return hard_assign(params, grid.centers());
}

CellStats hard_cell_stats(const HardAssignment &assignment, MeasureView measure);
inline CellStats hard_cell_stats(const HardAssignment &assignment, const GridMeasure &grid) {
  return hard_cell_stats(assignment, grid.view());
}

/// Hard C-transform min_i |y - x_i|^2 - g_i.
double hard_c_transform(const DiagramParams &params, const Vec2 &y);

/// Quantization energy sum_a nu_a |y_a - x_label(a)|^2.
double quantization_energy(const DiagramParams &params, const HardAssignment &assignment,
                           MeasureView measure);

struct LloydResult {
  DiagramParams params;  // weights identically zero
  CellStats stats;
  int iterations = 0;
  bool converged = false;
  /// Quantization energy after each assignment step, first entry at the
  /// initial sites.
  std::vector<double> energies;
  std::uint64_t seed = 0;
};

/// Centroidal Voronoi iteration from `n` distinct grid points drawn from the
/// prior. A cell that empties is reseeded at the heaviest point of the
/// currently largest cell (farthest from that cell's site on ties).
LloydResult lloyd_solve(int n, const GridMeasure &grid, std::uint64_t seed, int max_iters,
                        double tol);

/// One Lloyd update: assign with zero weights, move each occupied site to its
/// barycenter. Empty cells keep their site.
DiagramParams lloyd_step(const DiagramParams &params, const GridMeasure &grid);

struct DualSolveOptions {
  int max_iters = 20000;
  double initial_step = -1.0;  // <= 0 picks a scale from the grid
};

/// Weights solving the unregularized semi-discrete transport dual for fixed
/// sites, i.e. hard cell masses matching `target_masses` to within `tol`.
/// Ascends D[g] = int g^C dnu + m.g with gradient (target_i - nu(L_i)).
/// Returned weights satisfy g_0 == 0. Throws ConvergenceFailure carrying the
/// final residual when the budget is exhausted.
std::vector<double> sd_dual_solve(std::span<const Vec2> sites,
                                  std::span<const double> target_masses, const GridMeasure &grid,
                                  double tol, const DualSolveOptions &options = {});

/// max_i | m_i - target_i |.
double mass_residual(std::span<const double> masses, std::span<const double> targets);

void validate_targets(std::span<const double> targets, std::size_t n);

}  // namespace persuade
