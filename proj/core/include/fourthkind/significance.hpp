#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "fourthkind/model.hpp"

namespace fourthkind {

enum class BetaMethod { monte_carlo, asymptotic, gaussian_surrogate };

std::string_view to_string(BetaMethod method);
BetaMethod parse_beta_method(std::string_view text);

/// 1 - chi2_cdf(k, 2 ln(1/alpha)).
double beta_asymptotic(int k, double alpha);
/// 1 - chi2_cdf(r, (2N / (2N - 1)) ln(1/alpha)).
double beta_gaussian_surrogate(int r, int n, double alpha);

/// Monte Carlo settings: beta is the maximum over `theta_grid` of the
/// fraction of simulated datasets whose likelihood region excludes theta.
struct MonteCarloConfig {
  std::vector<Vector> theta_grid;
  std::size_t trials = 1000;
  /// Samples N per simulated dataset.
  std::size_t samples = 1;
  LikelihoodMode mode = LikelihoodMode::exact;
  /// MLE evaluation budget per simulated dataset (gaussian-noise, exact mode).
  std::size_t mle_budget = 5000;

  void validate(const ModelSpec& spec) const;
};

inline constexpr std::size_t kDefaultThetaGridSize = 25;
inline constexpr std::size_t kMinimumTrials = 100;

/// Latin-hypercube design of `count` points in the box plus `anchor` (usually
/// the MLE of the observed data) as the last entry.
std::vector<Vector> default_theta_grid(const ParameterBox& box, const Vector& anchor, RandomStream& stream,
                                       std::size_t count = kDefaultThetaGridSize);

/// 64 log-spaced values in [1e-6, 1], ascending.
std::vector<double> default_alpha_grid();

struct BetaEstimate {
  double beta = 0.0;
  double standard_error = 0.0;
  /// Index into the theta grid attaining the maximum.
  std::size_t argmax = 0;
  /// Fewer than kMinimumTrials trials per grid point.
  bool warning = false;
};

BetaEstimate beta_monte_carlo(const ModelSpec& spec, double alpha, const MonteCarloConfig& config,
                              RandomStream& stream);

/// Exact significance of a coin model over `theta_grid` by enumerating all
/// head counts (each coin tossed `samples` times its toss count).
BetaEstimate beta_coin_enumeration(const ModelSpec& spec, double alpha, std::span<const Vector> theta_grid,
                                   std::size_t samples = 1);

struct BetaPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double standard_error = 0.0;
};

struct BetaCurve {
  BetaMethod method = BetaMethod::asymptotic;
  std::vector<BetaPoint> points;
  /// Monte Carlo metadata (empty grid for closed forms).
  std::vector<Vector> theta_grid;
  std::size_t trials = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool warning = false;
};

/// Monte Carlo curve over `alphas`. The simulated datasets are shared by all
/// alpha values, so the curve is monotone in alpha.
BetaCurve beta_curve_monte_carlo(const ModelSpec& spec, std::span<const double> alphas,
                                 const MonteCarloConfig& config, RandomStream& stream);
BetaCurve beta_curve_asymptotic(int k, std::span<const double> alphas);
BetaCurve beta_curve_gaussian_surrogate(int r, int n, std::span<const double> alphas);

/// Closed-form inversions: the alpha with beta(alpha) = beta_star.
double alpha_for_beta_asymptotic(int k, double beta_star);
double alpha_for_beta_gaussian_surrogate(int r, int n, double beta_star);
/// Largest curve alpha with beta + 2 standard_error <= beta_star. Throws
/// CalibrationError when no grid point qualifies.
double alpha_for_beta(const BetaCurve& curve, double beta_star);

}  // namespace fourthkind
