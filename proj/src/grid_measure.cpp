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
#include "persuade/grid_measure.hpp"

#include <string>

namespace persuade {

GridMeasure build_grid(const Rect &bounds, int resolution) {
  if (resolution < 1)
    throw InvalidParams("grid resolution must be >= 1, got " + std::to_string(resolution));
  if (bounds.degenerate() || !std::isfinite(bounds.area()))
    throw InvalidParams("grid bounds must be a non-degenerate finite rectangle");

  GridMeasure g;
  g.bounds_ = bounds;
  g.resolution_ = resolution;
  g.cell_size_ = {bounds.width() / resolution, bounds.height() / resolution};

  const std::size_t count = static_cast<std::size_t>(resolution) * resolution;
  g.centers_.reserve(count);
  for (int row = 0; row < resolution; ++row) {
    const double y = bounds.lo.y + (row + 0.5) * g.cell_size_.y;
    for (int col = 0; col < resolution; ++col)
      g.centers_.push_back({bounds.lo.x + (col + 0.5) * g.cell_size_.x, y});
  }
  g.masses_.assign(count, 1.0 / static_cast<double>(count));
  g.total_mass_ = 1.0;
  return g;
}

GridMeasure DensitySpec::discretize(GridMeasure grid) const {
  if (is_uniform()) {
    const double w = 1.0 / static_cast<double>(grid.size());
    grid.masses_.assign(grid.size(), w);
    grid.total_mass_ = 1.0;
    return grid;
  }

  const double area = grid.cell_area();
  CompensatedSum total;
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double d = fn_(grid.centers_[a]);
    if (!(d >= 0.0) || !std::isfinite(d))
      throw InvalidParams("density must be finite and nonnegative on the grid");
    grid.masses_[a] = d * area;
    total.add(grid.masses_[a]);
  }
  const double z = total.value();
  if (!(z > 0.0)) throw DegenerateMeasure("density vanishes on every grid cell");

  for (double &m : grid.masses_) m /= z;
  CompensatedSum check;
  for (double m : grid.masses_) check.add(m);
  grid.total_mass_ = check.value();
  return grid;
}

Vec2 GridMeasure::barycenter() const {
  CompensatedSum sx, sy, sm;
  for (std::size_t a = 0; a < centers_.size(); ++a) {
    sx.add(masses_[a] * centers_[a].x);
    sy.add(masses_[a] * centers_[a].y);
    sm.add(masses_[a]);
  }
  return {sx.value() / sm.value(), sy.value() / sm.value()};
}

double mass_in(const GridMeasure &grid, const Rect &region) {
  CompensatedSum s;
  for (std::size_t a = 0; a < grid.size(); ++a)
    if (region.contains(grid.centers()[a])) s.add(grid.masses()[a]);
  return s.value();
}

}  // namespace persuade
