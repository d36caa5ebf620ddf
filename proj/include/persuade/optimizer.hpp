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
#include <stdexcept>
#include <vector>

#include "persuade/objective.hpp"

namespace persuade {

enum class InitStrategy { uniform_random, jittered_grid };
enum class GradMode { full_grid, monte_carlo };

/// Optional geometric blur schedule: eps_t = max(epsilon, start * decay^t).
struct Annealing {
  bool enabled = false;
  double start_epsilon = 0.0;
  double decay = 0.99;
};

struct OptimizerConfig {
  int n_init = 12;
  int max_iters = 2000;
  double learning_rate = 1e-2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  InitStrategy init = InitStrategy::uniform_random;
  GradMode grad_mode = GradMode::full_grid;
  int batch_size = 4096;
  double prune_mass_tol = 1e-4;
  double stop_grad_tol = 0.0;
  Annealing annealing;

  void validate() const;
};

struct TrajectoryPoint {
  double value = 0.0;       // penalized soft objective
  double grad_norm = 0.0;
  double best_value = 0.0;  // running max of `value`
  double hard_value = 0.0;  // unregularized objective of the same iterate
};

struct PruneCheck {
  int removed = 0;
  double value_before = 0.0;
  double value_after = 0.0;
  double bound = 0.0;
  bool within_bound = true;
};

struct OptResult {
  DiagramParams params;  // post-pruning
  ObjectiveReport report;
  double hard_value = 0.0;
  int effective_n = 0;
  std::vector<TrajectoryPoint> trajectory;
  std::uint64_t seed_used = 0;
  int iterations = 0;
  bool converged = false;  // stopped on stop_grad_tol

  /// Iterate with the largest hard objective seen, including the start.
  DiagramParams best_hard_params;
  double best_hard_value = 0.0;
  int best_hard_iteration = 0;

  PruneCheck prune;
};

/// Thrown when the objective or its gradient stops being finite.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string &what, DiagramParams last_valid, int iteration)
      : std::runtime_error(what), last_valid_(std::move(last_valid)), iteration_(iteration) {}
  const DiagramParams &last_valid() const { return last_valid_; }
  int iteration() const { return iteration_; }

 private:
  DiagramParams last_valid_;
  int iteration_;
};

/// n distinct sites inside the grid bounds, zero weights. Jittered-grid
/// places sites in distinct cells of a k x k lattice (k = ceil(sqrt n)) with
/// jitter of at most a quarter lattice step.
DiagramParams init_sites(int n, const GridMeasure &grid, std::uint64_t seed,
                         InitStrategy strategy = InitStrategy::uniform_random);

/// Adam ascent on the penalized soft objective over sites and weights.
OptResult optimize(const DiagramParams &init, const GridMeasure &grid, const ObjectiveConfig &obj,
                   const OptimizerConfig &opt);

/// Removes cells whose soft mass is below `mass_tol` and whose hard mass is 0.
/// Keeps at least the heaviest cell.
DiagramParams prune_cells(const DiagramParams &params, const SoftCellStats &soft,
                          const CellStats &hard, double mass_tol);
DiagramParams prune_cells(const DiagramParams &params, const GridMeasure &grid,
                          const EntropicConfig &cfg, double mass_tol);

/// Monte Carlo estimate of objective_gradient from `batch` i.i.d. draws of
/// the grid measure, each weighted 1 / batch. Masses and barycenters are
/// taken from the same batch.
ObjectiveGradient mc_gradient(const DiagramParams &params, const GridMeasure &grid,
                              const ObjectiveConfig &cfg, std::uint64_t sampler_seed, int batch);

}  // namespace persuade
