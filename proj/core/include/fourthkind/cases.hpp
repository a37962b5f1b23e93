#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fourthkind/game.hpp"
#include "fourthkind/significance.hpp"

namespace fourthkind {

/// How a scenario turns a target significance into a rarity level.
struct CalibrationSpec {
  BetaMethod method = BetaMethod::asymptotic;
  /// Degrees of freedom: k for asymptotic, r for gaussian-surrogate.
  /// 0 selects the parameter / observation dimension.
  int dof = 0;
  /// N for gaussian-surrogate; 0 selects the dataset's sample count.
  int samples = 0;
  /// Monte Carlo settings.
  std::size_t trials = 1000;
  /// "lhs:COUNT" (Latin hypercube over the box) or "local:PER_AXIS:HALF_WIDTH"
  /// (regular grid around the MLE); the MLE is always appended.
  std::string theta_grid = "lhs:25";
  std::size_t mle_budget = 5000;
};

struct Scenario {
  std::string name;
  std::string description;
  ModelSpec spec;
  /// Data-generating parameter.
  Vector truth;
  /// Observed data given inline; when absent, data are generated at `truth`
  /// with `data_seed`, or read from `data_file` if set.
  std::optional<Dataset> data;
  std::string data_file;
  std::size_t samples = 1;
  std::uint64_t data_seed = 0;
  LikelihoodMode mode = LikelihoodMode::exact;
  double beta_star = 0.05;
  /// Explicit rarity level; overrides calibration when set.
  std::optional<double> alpha;
  CalibrationSpec calibration;
  GameConfig game;
  /// Significance values for the risk sweep; empty selects 8 log-spaced
  /// values from 1e-3 up to the significance of the largest nonempty alpha.
  std::vector<double> risk_betas;

  void validate() const;
};

std::vector<std::string> builtin_scenario_names();
/// One of gaussian-mean, coin-1, coin-2, lotka-volterra, quadratic.
Scenario builtin_scenario(std::string_view name);

/// The scenario's observed data (inline, loaded, or generated).
Dataset scenario_data(const Scenario& scenario);
/// Observed model with its MLE fitted from a substream of `stream`.
std::shared_ptr<const ObservedModel> observe(const Scenario& scenario, RandomStream& stream);

std::vector<Vector> theta_grid_from_spec(std::string_view text, const ParameterBox& box, const Vector& mle,
                                         RandomStream& stream);

/// Significance of the scenario's calibration method at each alpha.
BetaCurve scenario_beta_curve(const Scenario& scenario, const ObservedModel& observed,
                              std::span<const double> alphas, RandomStream& stream);
/// Significance at a single alpha (closed form, or Monte Carlo).
double scenario_beta(const Scenario& scenario, const ObservedModel& observed, double alpha, RandomStream& stream);
/// Largest admissible alpha for `beta_star`, capped at the largest alpha with a
/// nonempty region.
double calibrate_alpha(const Scenario& scenario, const ObservedModel& observed, double beta_star,
                       RandomStream& stream);

/// Resolved alpha (explicit or calibrated) and the game solution.
GameSolution solve_scenario(const Scenario& scenario, const std::shared_ptr<const ObservedModel>& observed,
                            RandomStream& stream);

struct RiskRow {
  double beta = 0.0;
  double alpha = 0.0;
  std::optional<GameSolution> solution;
  /// Error category and message when the solve failed.
  std::string error;
  std::string message;
};

std::vector<double> default_risk_betas(const Scenario& scenario, const ObservedModel& observed,
                                       RandomStream& stream);
/// One solve per beta with seeds derived from `stream`; failures are recorded
/// in the row and the sweep continues.
std::vector<RiskRow> risk_sweep(const Scenario& scenario, const std::shared_ptr<const ObservedModel>& observed,
                                std::span<const double> betas, RandomStream& stream);

/// Log relative likelihood on a regular grid (k <= 2) or Latin hypercube (k > 2).
struct RegionSample {
  Vector theta;
  double log_relative = 0.0;
  bool inside = false;
};
std::vector<RegionSample> region_samples(const LikelihoodRegion& region, RandomStream& stream);

struct RunOptions {
  bool beta_curve = true;
  bool risk_curve = true;
  bool region = true;
};

struct ScenarioReport {
  Scenario scenario;
  Dataset data;
  MleResult mle;
  BetaCurve beta_curve;
  GameSolution solution;
  std::vector<RiskRow> risk_curve;
  std::vector<RegionSample> region;
};

ScenarioReport run_scenario(const Scenario& scenario, RandomStream& stream, const RunOptions& options = {});

}  // namespace fourthkind
