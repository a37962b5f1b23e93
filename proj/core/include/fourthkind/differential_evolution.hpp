#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "fourthkind/numerics.hpp"
#include "fourthkind/types.hpp"

namespace fourthkind {

/// Settings for the rand/1/bin differential evolution minimizer.
struct DEConfig {
  /// 0 selects max(20, 15 * dimension).
  std::size_t population = 0;
  double mutation = 0.8;
  double crossover = 0.9;
  std::size_t max_generations = 300;
  std::size_t restarts = 3;
  /// Stop a run when the best value improved by less than `convergence_tolerance`
  /// (relative) over this many generations.
  std::size_t convergence_window = 40;
  double convergence_tolerance = 1e-12;

  std::size_t population_for(std::size_t dimension) const;
  void validate() const;
};

using Objective = std::function<double(const Vector&)>;

struct DEResult {
  Vector best;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t generations = 0;
};

/// Minimizes `objective` over `box` with DE/rand/1/bin. Trial vectors are
/// clipped to the box. `seeds` replace the first members of the initial
/// Latin-hypercube population. Non-finite objective values rank last.
/// `max_evaluations` caps the total across restarts (0 = no cap).
DEResult minimize_de(const Objective& objective, const ParameterBox& box, const DEConfig& config,
                     RandomStream& stream, std::span<const Vector> seeds = {},
                     std::size_t max_evaluations = 0);

/// Compass (coordinate pattern) search from `start`, with steps starting at
/// `initial_step` times the box width and halving down to `final_step`.
DEResult polish_compass(const Objective& objective, const ParameterBox& box, const Vector& start,
                        double initial_step, double final_step, std::size_t max_evaluations);

}  // namespace fourthkind
