#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fourthkind/differential_evolution.hpp"
#include "fourthkind/numerics.hpp"
#include "fourthkind/types.hpp"

namespace fourthkind {

enum class ModelKind { gaussian_mean, bernoulli_coins, gaussian_noise };
enum class LikelihoodMode { exact, surrogate };

std::string_view to_string(ModelKind kind);
std::string_view to_string(LikelihoodMode mode);
ModelKind parse_model_kind(std::string_view text);
LikelihoodMode parse_likelihood_mode(std::string_view text);

/// m(theta) = theta.
struct IdentityMeasurement {};

/// m(t; theta) = theta_0 + theta_1 t + theta_2 t^2 on `points` interior
/// points of (t_min, t_max): t_i = t_min + (t_max - t_min) i / (points + 1).
struct QuadraticMeasurement {
  double t_min = 0.0;
  double t_max = 5.0;
  std::size_t points = 100;
};

/// Predator-prey solution map dx/dt = theta_1 x - eta x y,
/// dy/dt = xi x y - theta_2 y, integrated from t = 0 with classical RK4 using
/// the observation grid t_i = t_end i / steps (i = 1..steps) as step grid.
struct LotkaVolterraMeasurement {
  double eta = 0.025;
  double xi = 0.02;
  double x0 = 30.0;
  double y0 = 10.0;
  double t_end = 20.0;
  std::size_t steps = 200;
};

class MeasurementFunction {
 public:
  using Variant = std::variant<IdentityMeasurement, QuadraticMeasurement, LotkaVolterraMeasurement>;

  MeasurementFunction() = default;
  explicit MeasurementFunction(Variant impl) : impl_(std::move(impl)) {}

  /// Builds from an id in {identity, quadratic, lotka-volterra} and named
  /// constants; unknown constant names are rejected.
  static MeasurementFunction from_id(std::string_view id, const std::map<std::string, double>& constants);

  std::string_view id() const;
  std::map<std::string, double> constants() const;
  const Variant& variant() const { return impl_; }

  bool is_process() const { return !std::holds_alternative<IdentityMeasurement>(impl_); }
  /// Observation time grid (empty for identity).
  std::vector<double> time_grid() const;
  /// Components observed at each time (identity: the parameter dimension).
  std::size_t components_per_time(std::size_t parameter_dim) const;
  std::size_t output_dimension(std::size_t parameter_dim) const;

  /// Flattened observation vector, time-major. Lotka-Volterra entries become
  /// +inf once the integration leaves the finite range.
  Vector evaluate(const Vector& theta) const;

 private:
  Variant impl_;
};

/// Map phi from the parameter space to the decision space V:
/// phi(theta) = A theta + b, identity when no matrix is given.
class QuantityOfInterest {
 public:
  QuantityOfInterest() = default;
  QuantityOfInterest(Matrix matrix, Vector offset);

  static QuantityOfInterest identity() { return {}; }
  bool is_identity() const { return matrix_.size() == 0; }
  const Matrix& matrix() const { return matrix_; }
  const Vector& offset() const { return offset_; }

  std::size_t output_dimension(std::size_t parameter_dim) const;
  Vector operator()(const Vector& theta) const;

 private:
  Matrix matrix_;
  Vector offset_;
};

struct ModelSpec {
  ModelKind kind = ModelKind::gaussian_mean;
  ParameterBox box;
  double sigma = 1.0;
  MeasurementFunction measurement;
  QuantityOfInterest qoi;
  /// Tosses per coin in one run of the experiment (bernoulli-coins only).
  std::vector<std::size_t> tosses;

  std::size_t parameter_dimension() const { return box.dimension(); }
  std::size_t decision_dimension() const { return qoi.output_dimension(parameter_dimension()); }
  /// Dimension r of one observation vector.
  std::size_t observation_dimension() const;
  void validate() const;
};

/// Ordered observations. Gaussian kinds store one flattened vector of length
/// r per sample; process models additionally carry the time grid. Coin data
/// stores one (coin index, outcome) pair per toss.
struct Dataset {
  std::vector<Vector> samples;
  std::vector<double> times;

  std::size_t sample_count() const { return samples.size(); }
  std::size_t dimension() const { return samples.empty() ? 0 : static_cast<std::size_t>(samples.front().size()); }
  void validate() const;
};

/// Builds a coin dataset with the given heads/tails per coin.
Dataset coin_dataset(std::span<const std::size_t> heads, std::span<const std::size_t> tails);

struct MleResult {
  Vector theta;
  double log_likelihood = 0.0;
  /// Residual sum of squares at theta (Gaussian kinds; NaN for coins).
  double residual_sum = 0.0;
  std::size_t evaluations = 0;
  /// Set when the search never improved on its box-center start.
  bool warning = false;
};

/// Default evaluation budget for the MLE search of gaussian-noise models.
inline constexpr std::size_t kDefaultMleBudget = 20000;

/// A model bound to observed data, with sufficient statistics precomputed and
/// an optional cached maximum-likelihood fit. Immutable once built.
class ObservedModel {
 public:
  ObservedModel(ModelSpec spec, Dataset data, std::optional<MleResult> mle = std::nullopt);

  /// Fits the MLE once and caches it.
  static ObservedModel fitted(ModelSpec spec, Dataset data, RandomStream& stream,
                              std::size_t budget = kDefaultMleBudget,
                              std::span<const Vector> seeds = {});

  const ModelSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }
  const std::optional<MleResult>& mle() const { return mle_; }
  const MleResult& require_mle() const;

  bool is_gaussian() const { return spec_.kind != ModelKind::bernoulli_coins; }

  /// Sum_j |x_j - m(theta)|^2 (Gaussian kinds).
  double residual_sum(const Vector& theta) const;
  /// Sum_j |x_j - xbar|^2, the residual of the unconstrained mean bound.
  double mean_residual_sum() const { return mean_residual_; }
  /// Residual at the normalizer used by `mode` (MLE residual or the mean bound).
  double reference_residual(LikelihoodMode mode) const;

  double log_likelihood(const Vector& theta) const;
  /// log of p(D|theta) / sup p (exact) or p(D|theta) / M'(D) (surrogate).
  double relative_log_likelihood(const Vector& theta, LikelihoodMode mode) const;

  const std::vector<std::size_t>& heads() const { return heads_; }
  const std::vector<std::size_t>& tails() const { return tails_; }

 private:
  void check_theta(const Vector& theta) const;
  double gaussian_constant() const;

  ModelSpec spec_;
  Dataset data_;
  std::optional<MleResult> mle_;
  Vector mean_;
  double mean_residual_ = 0.0;
  std::vector<std::size_t> heads_;
  std::vector<std::size_t> tails_;
};

double log_likelihood(const ModelSpec& spec, const Dataset& data, const Vector& theta);

double relative_log_likelihood(const ModelSpec& spec, const Dataset& data, const Vector& theta,
                               LikelihoodMode mode, const MleResult* mle = nullptr);

/// Draws `count` independent repetitions of the experiment at theta. Coins
/// toss each coin `spec.tosses[i]` times per repetition.
Dataset sample_data(const ModelSpec& spec, const Vector& theta, std::size_t count, RandomStream& stream);

/// Closed form for gaussian-mean (clamped sample mean) and coins (h/n);
/// differential evolution plus compass polish on the residual sum for
/// gaussian-noise. `seeds` join the initial population.
MleResult find_mle(const ModelSpec& spec, const Dataset& data, RandomStream& stream,
                   std::size_t budget = kDefaultMleBudget, std::span<const Vector> seeds = {});

Vector evaluate_measurement(const MeasurementFunction& fn, const Vector& theta);

}  // namespace fourthkind
