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

// Persuasion objective over Laguerre diagrams.
//
//   hard:  F[X,g]   = sum_{m_i > 0} m_i Phi(b_i)
//   soft:  F^eps    = sum_i m_i^eps Phi(b_i^eps)
//   penalty R^eps   = sum_i sum_a |y_a - x_i|^2 chi_ia nu_a
//                   + sum_{i != j} m_i^eps m_j^eps / |x_i - x_j|^2
//   penalized value = F^eps - eta R^eps

#include <vector>

#include "persuade/entropic.hpp"
#include "persuade/payoff.hpp"
#include "persuade/power_diagram.hpp"

namespace persuade {

struct ObjectiveConfig {
  double eta = 0.0;
  EntropicConfig entropic;
  PayoffModel payoff{ConcaveBowl{}};

  void validate() const;
};

struct CellReport {
  double mass = 0.0;
  Vec2 barycenter;
  double phi = 0.0;
};

struct ObjectiveReport {
  double value = 0.0;         // payoff_term - eta * penalty_term
  double payoff_term = 0.0;   // F^eps
  double penalty_term = 0.0;  // R^eps
  double quantization_term = 0.0;
  double repulsion_term = 0.0;
  std::vector<CellReport> per_cell;
};

struct ObjectiveGradient {
  std::vector<Vec2> d_sites;
  std::vector<double> d_weights;
  ObjectiveReport report;

  double norm() const;
};

double hard_objective(const DiagramParams &params, MeasureView measure, const PayoffModel &payoff);
inline double hard_objective(const DiagramParams &params, const GridMeasure &grid,
                             const PayoffModel &payoff) {
  return hard_objective(params, grid.view(), payoff);
}
/// Same, from precomputed hard statistics.
double hard_objective(const CellStats &stats, const PayoffModel &payoff);

/// Soft penalty R^{eps,h}. Throws SingularPenalty when two sites coincide.
double penalty_value(const DiagramParams &params, MeasureView measure, const EntropicConfig &cfg);
inline double penalty_value(const DiagramParams &params, const GridMeasure &grid,
                            const EntropicConfig &cfg) {
  return penalty_value(params, grid.view(), cfg);
}

ObjectiveReport soft_objective(const DiagramParams &params, MeasureView measure,
                               const ObjectiveConfig &cfg);
inline ObjectiveReport soft_objective(const DiagramParams &params, const GridMeasure &grid,
                                      const ObjectiveConfig &cfg) {
  return soft_objective(params, grid.view(), cfg);
}

/// Exact gradient of the penalized soft objective in (X, g), computed in
/// reverse mode: the objective's sensitivity to each membership chi_ja is
/// formed once per point and pulled back through the softmax. O(n) per point.
ObjectiveGradient objective_gradient(const DiagramParams &params, MeasureView measure,
                                     const ObjectiveConfig &cfg);
inline ObjectiveGradient objective_gradient(const DiagramParams &params, const GridMeasure &grid,
                                            const ObjectiveConfig &cfg) {
  return objective_gradient(params, grid.view(), cfg);
}

/// The same gradient assembled forward from membership derivatives: d m_j,
/// d b_j and d R for every parameter z, then the chain rule
/// dF = sum_j dm_j Phi(b_j) + m_j grad Phi(b_j) . db_j - eta dR.
/// O(n^2) per point; kept as an independent route for verification.
ObjectiveGradient objective_gradient_forward(const DiagramParams &params, MeasureView measure,
                                             const ObjectiveConfig &cfg);
inline ObjectiveGradient objective_gradient_forward(const DiagramParams &params,
                                                    const GridMeasure &grid,
                                                    const ObjectiveConfig &cfg) {
  return objective_gradient_forward(params, grid.view(), cfg);
}

}  // namespace persuade
