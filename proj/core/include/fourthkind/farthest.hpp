#pragma once

#include <cstddef>
#include <span>

#include "fourthkind/differential_evolution.hpp"
#include "fourthkind/model.hpp"
#include "fourthkind/region.hpp"

namespace fourthkind {

/// Penalty continuation for the constrained farthest-point search.
struct MeritConfig {
  double initial_mu = 1.0;
  double growth = 10.0;
  double mu_cap = 1e8;
  /// Relative feasibility tolerance on the region constraint.
  double tolerance = kDefaultFeasibilityTolerance;

  void validate() const;
};

/// Declared quality of the farthest-point oracle: the returned squared
/// distance is assumed to be at least 1/(1+delta) of the supremum. Not proven.
inline constexpr double kDeclaredOracleQuality = 0.01;

struct FarthestResult {
  Vector theta;
  Vector phi;
  double distance = 0.0;
  /// Penalty rounds run (including the feasibility round, if any).
  std::size_t rounds = 0;
  std::size_t evaluations = 0;
};

/// Approximately maximizes |phi(theta) - c| over the likelihood region.
///
/// Each round minimizes -|phi - c|^2 + mu max(0, violation) by differential
/// evolution, seeded with the incumbent, for mu = initial_mu, initial_mu *
/// growth, ... up to mu_cap; a compass search with an extreme barrier then
/// polishes the best feasible point seen. The MLE and `seeds` join every
/// initial population. Throws InfeasibleError if no feasible point is found.
FarthestResult farthest_point(const LikelihoodRegion& region, const QuantityOfInterest& qoi, const Vector& c,
                              const DEConfig& de, const MeritConfig& merit, RandomStream& stream,
                              std::span<const Vector> seeds = {});

}  // namespace fourthkind
