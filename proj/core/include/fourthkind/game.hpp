#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fourthkind/error.hpp"
#include "fourthkind/farthest.hpp"
#include "fourthkind/miniball.hpp"
#include "fourthkind/region.hpp"

namespace fourthkind {

struct Atom {
  double weight = 0.0;
  Vector theta;
  /// Image phi(theta) in the decision space.
  Vector phi;
};

/// Weighted Dirac atoms on the parameter box.
struct DiscreteMeasure {
  std::vector<Atom> atoms;

  std::size_t size() const { return atoms.size(); }
  /// Checks weights are nonnegative and sum to 1 within 1e-12.
  void validate() const;
  /// Sum_i w_i phi(theta_i), from the stored images.
  Vector mean() const;
};

/// E|phi - E phi|^2 = sum w_i |phi_i|^2 - |sum w_i phi_i|^2, from stored images.
double variance_of(const DiscreteMeasure& measure);
/// Same with images recomputed through `qoi`.
double variance_of(const DiscreteMeasure& measure, const QuantityOfInterest& qoi);

struct GameConfig {
  /// Stopping tolerance epsilon_0 of the REPEAT loop.
  double epsilon = 0.01;
  /// Declared farthest-point oracle quality.
  double delta = kDeclaredOracleQuality;
  DEConfig de;
  MeritConfig merit;

  void validate() const;
};

/// ceil(16 / eps^2 (1 + 2 delta)).
std::size_t iteration_cap(double epsilon, double delta);
/// min(2 + iteration_cap, n + 2) for decision dimension n.
std::size_t working_set_cap(double epsilon, double delta, std::size_t decision_dimension);

struct TraceEntry {
  std::size_t iteration = 0;
  /// Working-set size when the miniball was computed.
  std::size_t working_set = 0;
  std::size_t support = 0;
  double radius = 0.0;
  /// Distance from the ball center to the new farthest point.
  double distance = 0.0;
  Vector center;
};

struct GameSolution {
  double alpha = 0.0;
  /// Significance of alpha under the calibration method (NaN when unknown).
  double beta = 0.0;
  /// Optimal decision: center of the final working-set ball.
  Vector decision;
  /// Squared radius of the final working-set ball.
  double risk = 0.0;
  double raw_radius = 0.0;
  /// Radius of the returned ball, (1 + epsilon)(1 + delta) raw_radius.
  double enlarged_radius = 0.0;
  /// ((1 + delta) max(raw_radius, last farthest distance))^2: a ball around the
  /// decision with this squared radius covers the region's image.
  double risk_upper = 0.0;
  DiscreteMeasure measure;
  /// Variance of the worst-case measure.
  double variance = 0.0;
  /// risk_upper - variance.
  double gap = 0.0;
  std::size_t iterations = 0;
  std::size_t max_working_set = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<TraceEntry> trace;
};

class NonconvergedError : public Error {
 public:
  NonconvergedError(const std::string& message, std::vector<TraceEntry> trace)
      : Error(ErrorCategory::nonconverged, message), trace_(std::move(trace)) {}

  const std::vector<TraceEntry>& trace() const noexcept { return trace_; }

 private:
  std::vector<TraceEntry> trace_;
};

/// Core-set miniball iteration over the region's image: start from an
/// approximate diameter pair, then repeatedly take the miniball of the working
/// set, prune it to at most n+1 points, ask the oracle for the farthest feasible
/// point and add it, until that point lies within the (1 + epsilon) ball.
/// Throws NonconvergedError when iteration_cap is exceeded.
GameSolution solve_game(const LikelihoodRegion& region, const QuantityOfInterest& qoi, const GameConfig& config,
                        RandomStream& stream);

/// Weights w on the simplex with sum w_i z_i = center, maximizing
/// sum w_i |z_i|^2 among such weights. Throws InconsistentSupportError when
/// the center is outside the hull by more than 1e-8 (1 + |center|).
Vector solve_weights(std::span<const Vector> points, const Vector& center);

struct Certificate {
  /// Variance of the returned measure: a lower bound on the optimal variance.
  double lower = 0.0;
  /// Squared radius of a covering ball: an upper bound.
  double upper = 0.0;
  double gap = 0.0;
};

Certificate certificate(const GameSolution& solution);

}  // namespace fourthkind
