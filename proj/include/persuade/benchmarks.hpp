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
#include <string>
#include <vector>

#include "persuade/payoff.hpp"
#include "persuade/power_diagram.hpp"

namespace persuade {

struct BenchmarkRow {
  MarketConfig market;
  std::string param_name;  // swept parameter, e.g. "p2"
  double param = 0.0;
  double r_opt = 0.0;
  double r_noinfo = 0.0;
  double r_lloyd = 0.0;
  double r_fullinfo = 0.0;
  std::optional<double> pp;  // percent gain of r_opt over r_fullinfo
  int effective_n = 0;
  std::uint64_t seed = 0;
  std::uint64_t lloyd_seed = 0;
};

/// Revenue of the one-cell policy at the prior barycenter.
double no_info_revenue(const MarketConfig &market, const GridMeasure &grid);

/// sum_a nu_a revenue(y_a): every state revealed.
double full_info_revenue(const MarketConfig &market, const GridMeasure &grid);

struct LloydRevenue {
  double value = 0.0;
  std::uint64_t seed = 0;
  DiagramParams params;
};

inline constexpr int kLloydMaxIters = 500;
inline constexpr double kLloydTol = 1e-9;

/// Revenue of the centroidal Voronoi diagram with n cells from one seed.
double lloyd_revenue(int n, const MarketConfig &market, const GridMeasure &grid,
                     std::uint64_t seed);

/// Best Lloyd revenue over seeds base_seed, ..., base_seed + k - 1.
LloydRevenue best_lloyd_revenue(int n, const MarketConfig &market, const GridMeasure &grid,
                                std::uint64_t base_seed, int k = 5);

/// 100 (r_opt - r_fullinfo) / r_fullinfo, or nothing when r_fullinfo <= 0.
std::optional<double> improvement_pp(double r_opt, double r_fullinfo);

struct ImprovementTable {
  std::vector<BenchmarkRow> rows;

  /// Columns as in the CSV header, 4 decimals, "NA" for a missing pp.
  std::string to_csv() const;
  /// Five-row layout: R_opt, R(noinfo), R_Lloyd, E(R), pp over the swept values.
  std::string render_text() const;
};

ImprovementTable improvement_table(std::vector<BenchmarkRow> rows);

inline constexpr const char *kTableCsvHeader =
    "param,r_opt,r_noinfo,r_lloyd,r_fullinfo,pp,effective_n,seed";

}  // namespace persuade
