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

#include <functional>
#include <span>
#include <vector>

#include "persuade/core.hpp"

namespace persuade {

/// Weighted point cloud. Everything downstream of the discretization
/// (partitions, objectives, gradients) integrates against one of these, so
/// the same code serves the full grid and Monte Carlo batches.
struct MeasureView {
  std::span<const Vec2> points;
  std::span<const double> masses;

  std::size_t size() const { return points.size(); }
};

/// Uniform M x M midpoint grid over a rectangle carrying a discrete
/// probability measure. Point index is `row * M + col`, `col` running along
/// the first axis.
class GridMeasure {
 public:
  const Rect &bounds() const { return bounds_; }
  int resolution() const { return resolution_; }
  /// Cell size along each axis.
  Vec2 cell_size() const { return cell_size_; }
  double cell_area() const { return cell_size_.x * cell_size_.y; }
  std::size_t size() const { return centers_.size(); }

  const std::vector<Vec2> &centers() const { return centers_; }
  const std::vector<double> &masses() const { return masses_; }
  double total_mass() const { return total_mass_; }

  const Vec2 &center(int col, int row) const { return centers_[index(col, row)]; }
  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * resolution_ + col;
  }

  /// Prior barycenter b[D] = sum_a nu_a y_a / sum_a nu_a.
  Vec2 barycenter() const;

  MeasureView view() const { return {centers_, masses_}; }

 private:
  friend GridMeasure build_grid(const Rect &, int);
  friend class DensitySpec;

  Rect bounds_;
  int resolution_ = 0;
  Vec2 cell_size_;
  std::vector<Vec2> centers_;
  std::vector<double> masses_;
  double total_mass_ = 0.0;
};

/// Prior density with respect to Lebesgue measure on the grid rectangle.
class DensitySpec {
 public:
  using Function = std::function<double(const Vec2 &)>;

  static DensitySpec uniform() { return DensitySpec{}; }
  static DensitySpec from_function(Function f) { return DensitySpec{std::move(f)}; }

  bool is_uniform() const { return !fn_; }
  double operator()(const Vec2 &p) const { return fn_ ? fn_(p) : 1.0; }

  /// Midpoint quadrature followed by renormalization to unit total mass.
  /// Throws InvalidParams on a negative density value and DegenerateMeasure if
  /// the density vanishes at every grid center.
  GridMeasure discretize(GridMeasure grid) const;

 private:
  DensitySpec() = default;
  explicit DensitySpec(Function f) : fn_(std::move(f)) {}

  Function fn_;
};

/// M x M midpoint grid with equal unit-total masses. Throws InvalidParams for
/// resolution < 1 or a degenerate rectangle.
GridMeasure build_grid(const Rect &bounds, int resolution);

inline GridMeasure discretize_density(const DensitySpec &spec, GridMeasure grid) {
  return spec.discretize(std::move(grid));
}

/// Sum of masses over grid points inside `region` (closed).
double mass_in(const GridMeasure &grid, const Rect &region);

}  // namespace persuade
