#include "fourthkind/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double take_constant(std::map<std::string, double>& constants, const std::string& name, double fallback) {
  const auto it = constants.find(name);
  if (it == constants.end()) return fallback;
  const double value = it->second;
  constants.erase(it);
  return value;
}

std::size_t take_count(std::map<std::string, double>& constants, const std::string& name,
                       std::size_t fallback) {
  const double value = take_constant(constants, name, static_cast<double>(fallback));
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw DomainError("measurement constant '" + name + "' must be a positive integer");
  }
  return static_cast<std::size_t>(value);
}

Vector quadratic_curve(const QuadraticMeasurement& q, const Vector& theta) {
  if (theta.size() != 3) throw DomainError("quadratic measurement needs a 3-dimensional parameter");
  Vector out(static_cast<Eigen::Index>(q.points));
  const double span = q.t_max - q.t_min;
  for (std::size_t i = 0; i < q.points; ++i) {
    const double t = q.t_min + span * static_cast<double>(i + 1) / static_cast<double>(q.points + 1);
    out[static_cast<Eigen::Index>(i)] = theta[0] + theta[1] * t + theta[2] * t * t;
  }
  return out;
}

Vector lotka_volterra_path(const LotkaVolterraMeasurement& lv, const Vector& theta) {
  if (theta.size() != 2) throw DomainError("Lotka-Volterra measurement needs a 2-dimensional parameter");
  const double a = theta[0];
  const double b = theta[1];
  const double h = lv.t_end / static_cast<double>(lv.steps);
  auto deriv = [&](double x, double y, double& dx, double& dy) {
    dx = a * x - lv.eta * x * y;
    dy = lv.xi * x * y - b * y;
  };
  Vector out(static_cast<Eigen::Index>(2 * lv.steps));
  double x = lv.x0;
  double y = lv.y0;
  for (std::size_t i = 0; i < lv.steps; ++i) {
    double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    deriv(x, y, k1x, k1y);
    deriv(x + 0.5 * h * k1x, y + 0.5 * h * k1y, k2x, k2y);
    deriv(x + 0.5 * h * k2x, y + 0.5 * h * k2y, k3x, k3y);
    deriv(x + h * k3x, y + h * k3y, k4x, k4y);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      out.tail(static_cast<Eigen::Index>(2 * (lv.steps - i))).setConstant(kInf);
      return out;
    }
    out[static_cast<Eigen::Index>(2 * i)] = x;
    out[static_cast<Eigen::Index>(2 * i + 1)] = y;
  }
  return out;
}

Vector sample_mean(const Dataset& data) {
  Vector mean = Vector::Zero(static_cast<Eigen::Index>(data.dimension()));
  for (const Vector& x : data.samples) mean += x;
  return mean / static_cast<double>(data.sample_count());
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gaussian_mean:
      return "gaussian-mean";
    case ModelKind::bernoulli_coins:
      return "bernoulli-coins";
    case ModelKind::gaussian_noise:
      return "gaussian-noise";
  }
  return "unknown";
}

std::string_view to_string(LikelihoodMode mode) {
  return mode == LikelihoodMode::exact ? "exact" : "surrogate";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "gaussian-mean") return ModelKind::gaussian_mean;
  if (text == "bernoulli-coins") return ModelKind::bernoulli_coins;
  if (text == "gaussian-noise") return ModelKind::gaussian_noise;
  throw DomainError("unknown model kind '" + std::string(text) + "'");
}

LikelihoodMode parse_likelihood_mode(std::string_view text) {
  if (text == "exact") return LikelihoodMode::exact;
  if (text == "surrogate") return LikelihoodMode::surrogate;
  throw DomainError("unknown likelihood mode '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// MeasurementFunction

MeasurementFunction MeasurementFunction::from_id(std::string_view id,
                                                 const std::map<std::string, double>& constants) {
  auto rest = constants;
  MeasurementFunction fn;
  if (id == "identity") {
    fn = MeasurementFunction(IdentityMeasurement{});
  } else if (id == "quadratic") {
    QuadraticMeasurement q;
    q.t_min = take_constant(rest, "t_min", q.t_min);
    q.t_max = take_constant(rest, "t_max", q.t_max);
    q.points = take_count(rest, "points", q.points);
    if (!(q.t_max > q.t_min)) throw DomainError("quadratic measurement needs t_max > t_min");
    fn = MeasurementFunction(q);
  } else if (id == "lotka-volterra") {
    LotkaVolterraMeasurement lv;
    lv.eta = take_constant(rest, "eta", lv.eta);
    lv.xi = take_constant(rest, "xi", lv.xi);
    lv.x0 = take_constant(rest, "x0", lv.x0);
    lv.y0 = take_constant(rest, "y0", lv.y0);
    lv.t_end = take_constant(rest, "t_end", lv.t_end);
    lv.steps = take_count(rest, "steps", lv.steps);
    if (!(lv.t_end > 0.0)) throw DomainError("Lotka-Volterra measurement needs t_end > 0");
    fn = MeasurementFunction(lv);
  } else {
    throw DomainError("unknown measurement function '" + std::string(id) + "'");
  }
  if (!rest.empty()) {
    throw DomainError("unknown constant '" + rest.begin()->first + "' for measurement '" + std::string(id) + "'");
  }
  return fn;
}

std::string_view MeasurementFunction::id() const {
  return std::visit(Overloaded{
                        [](const IdentityMeasurement&) { return std::string_view("identity"); },
                        [](const QuadraticMeasurement&) { return std::string_view("quadratic"); },
                        [](const LotkaVolterraMeasurement&) { return std::string_view("lotka-volterra"); },
                    },
                    impl_);
}

std::map<std::string, double> MeasurementFunction::constants() const {
  return std::visit(Overloaded{
                        [](const IdentityMeasurement&) { return std::map<std::string, double>{}; },
                        [](const QuadraticMeasurement& q) {
                          return std::map<std::string, double>{
                              {"t_min", q.t_min}, {"t_max", q.t_max}, {"points", static_cast<double>(q.points)}};
                        },
                        [](const LotkaVolterraMeasurement& lv) {
                          return std::map<std::string, double>{{"eta", lv.eta},
                                                               {"xi", lv.xi},
                                                               {"x0", lv.x0},
                                                               {"y0", lv.y0},
                                                               {"t_end", lv.t_end},
                                                               {"steps", static_cast<double>(lv.steps)}};
                        },
                    },
                    impl_);
}

std::vector<double> MeasurementFunction::time_grid() const {
  std::vector<double> grid;
  std::visit(Overloaded{
                 [](const IdentityMeasurement&) {},
                 [&](const QuadraticMeasurement& q) {
                   for (std::size_t i = 0; i < q.points; ++i) {
                     grid.push_back(q.t_min + (q.t_max - q.t_min) * static_cast<double>(i + 1) /
                                                  static_cast<double>(q.points + 1));
                   }
                 },
                 [&](const LotkaVolterraMeasurement& lv) {
                   for (std::size_t i = 0; i < lv.steps; ++i) {
                     grid.push_back(lv.t_end * static_cast<double>(i + 1) / static_cast<double>(lv.steps));
                   }
                 },
             },
             impl_);
  return grid;
}

std::size_t MeasurementFunction::components_per_time(std::size_t parameter_dim) const {
  return std::visit(Overloaded{
                        [&](const IdentityMeasurement&) { return parameter_dim; },
                        [](const QuadraticMeasurement&) { return std::size_t{1}; },
                        [](const LotkaVolterraMeasurement&) { return std::size_t{2}; },
                    },
                    impl_);
}

std::size_t MeasurementFunction::output_dimension(std::size_t parameter_dim) const {
  return std::visit(Overloaded{
                        [&](const IdentityMeasurement&) { return parameter_dim; },
                        [](const QuadraticMeasurement& q) { return q.points; },
                        [](const LotkaVolterraMeasurement& lv) { return 2 * lv.steps; },
                    },
                    impl_);
}

Vector MeasurementFunction::evaluate(const Vector& theta) const {
  return std::visit(Overloaded{
                        [&](const IdentityMeasurement&) -> Vector { return theta; },
                        [&](const QuadraticMeasurement& q) { return quadratic_curve(q, theta); },
                        [&](const LotkaVolterraMeasurement& lv) { return lotka_volterra_path(lv, theta); },
                    },
                    impl_);
}

Vector evaluate_measurement(const MeasurementFunction& fn, const Vector& theta) { return fn.evaluate(theta); }

// ---------------------------------------------------------------------------
// QuantityOfInterest

QuantityOfInterest::QuantityOfInterest(Matrix matrix, Vector offset)
    : matrix_(std::move(matrix)), offset_(std::move(offset)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0) throw DomainError("quantity of interest matrix is empty");
  if (offset_.size() == 0) offset_ = Vector::Zero(matrix_.rows());
  if (offset_.size() != matrix_.rows()) throw DomainError("quantity of interest offset has the wrong length");
}

std::size_t QuantityOfInterest::output_dimension(std::size_t parameter_dim) const {
  return is_identity() ? parameter_dim : static_cast<std::size_t>(matrix_.rows());
}

Vector QuantityOfInterest::operator()(const Vector& theta) const {
  if (is_identity()) return theta;
  return matrix_ * theta + offset_;
}

// ---------------------------------------------------------------------------
// ModelSpec / Dataset

std::size_t ModelSpec::observation_dimension() const {
  switch (kind) {
    case ModelKind::gaussian_mean:
      return parameter_dimension();
    case ModelKind::bernoulli_coins:
      return 2;
    case ModelKind::gaussian_noise:
      return measurement.output_dimension(parameter_dimension());
  }
  return 0;
}

void ModelSpec::validate() const {
  if (box.dimension() == 0) throw DomainError("model has an empty parameter box");
  if (kind != ModelKind::bernoulli_coins && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw DomainError("Gaussian models need sigma > 0");
  }
  if (kind == ModelKind::bernoulli_coins) {
    for (std::size_t i = 0; i < box.dimension(); ++i) {
      const auto a = static_cast<Eigen::Index>(i);
      if (box.lower()[a] < 0.0 || box.upper()[a] > 1.0) {
        throw DomainError("coin probabilities must lie in [0, 1]");
      }
    }
    if (!tosses.empty() && tosses.size() != box.dimension()) {
      throw DomainError("coin model needs one toss count per coin");
    }
  }
  if (kind == ModelKind::gaussian_noise) {
    // Evaluating at the box center checks the parameter dimension.
    measurement.evaluate(box.center());
  }
  if (!qoi.is_identity() && static_cast<std::size_t>(qoi.matrix().cols()) != parameter_dimension()) {
    throw DomainError("quantity of interest matrix does not match the parameter dimension");
  }
}

void Dataset::validate() const {
  if (samples.empty()) throw DomainError("dataset needs at least one sample");
  const auto r = samples.front().size();
  for (const Vector& x : samples) {
    if (x.size() != r) throw DomainError("dataset samples differ in dimension");
  }
}

Dataset coin_dataset(std::span<const std::size_t> heads, std::span<const std::size_t> tails) {
  if (heads.size() != tails.size()) throw DomainError("coin_dataset: heads and tails differ in length");
  Dataset data;
  for (std::size_t coin = 0; coin < heads.size(); ++coin) {
    for (std::size_t i = 0; i < heads[coin] + tails[coin]; ++i) {
      Vector row(2);
      row << static_cast<double>(coin), i < heads[coin] ? 1.0 : 0.0;
      data.samples.push_back(row);
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// ObservedModel

ObservedModel::ObservedModel(ModelSpec spec, Dataset data, std::optional<MleResult> mle)
    : spec_(std::move(spec)), data_(std::move(data)), mle_(std::move(mle)) {
  spec_.validate();
  data_.validate();
  if (data_.dimension() != spec_.observation_dimension()) {
    throw DomainError("dataset dimension " + std::to_string(data_.dimension()) +
                      " does not match the model observation dimension " +
                      std::to_string(spec_.observation_dimension()));
  }
  if (is_gaussian()) {
    mean_ = sample_mean(data_);
    for (const Vector& x : data_.samples) mean_residual_ += (x - mean_).squaredNorm();
  } else {
    const std::size_t coins = spec_.parameter_dimension();
    heads_.assign(coins, 0);
    tails_.assign(coins, 0);
    for (const Vector& row : data_.samples) {
      const double index = row[0];
      if (index < 0.0 || index != std::floor(index) || index >= static_cast<double>(coins)) {
        throw DomainError("coin dataset has an invalid coin index");
      }
      const auto coin = static_cast<std::size_t>(index);
      if (row[1] == 1.0) {
        ++heads_[coin];
      } else if (row[1] == 0.0) {
        ++tails_[coin];
      } else {
        throw DomainError("coin outcomes must be 0 or 1");
      }
    }
  }
  if (mle_ && !spec_.box.contains(mle_->theta)) throw DomainError("cached MLE lies outside the parameter box");
}

ObservedModel ObservedModel::fitted(ModelSpec spec, Dataset data, RandomStream& stream, std::size_t budget,
                                    std::span<const Vector> seeds) {
  MleResult mle = find_mle(spec, data, stream, budget, seeds);
  return ObservedModel(std::move(spec), std::move(data), std::move(mle));
}

const MleResult& ObservedModel::require_mle() const {
  if (!mle_) throw StateError("exact relative likelihood requires a cached MLE");
  return *mle_;
}

void ObservedModel::check_theta(const Vector& theta) const {
  if (!spec_.box.contains(theta)) throw DomainError("parameter lies outside the box");
}

double ObservedModel::residual_sum(const Vector& theta) const {
  if (!is_gaussian()) throw DomainError("residual sums are defined for Gaussian models only");
  const Vector m = spec_.kind == ModelKind::gaussian_mean ? theta : spec_.measurement.evaluate(theta);
  if (!m.allFinite()) return kInf;
  return mean_residual_ + static_cast<double>(data_.sample_count()) * (m - mean_).squaredNorm();
}

double ObservedModel::reference_residual(LikelihoodMode mode) const {
  if (!is_gaussian()) throw DomainError("residual sums are defined for Gaussian models only");
  if (mode == LikelihoodMode::surrogate) return mean_residual_;
  return require_mle().residual_sum;
}

double ObservedModel::gaussian_constant() const {
  const double rn = static_cast<double>(data_.dimension() * data_.sample_count());
  return -rn * std::log(spec_.sigma * std::sqrt(2.0 * std::numbers::pi));
}

double ObservedModel::log_likelihood(const Vector& theta) const {
  check_theta(theta);
  if (is_gaussian()) {
    return gaussian_constant() - residual_sum(theta) / (2.0 * spec_.sigma * spec_.sigma);
  }
  double total = 0.0;
  for (std::size_t coin = 0; coin < heads_.size(); ++coin) {
    const double p = theta[static_cast<Eigen::Index>(coin)];
    total += xlogy(static_cast<double>(heads_[coin]), p) + xlogy(static_cast<double>(tails_[coin]), 1.0 - p);
  }
  return total;
}

double ObservedModel::relative_log_likelihood(const Vector& theta, LikelihoodMode mode) const {
  check_theta(theta);
  if (is_gaussian()) {
    const double reference = reference_residual(mode);
    const double value = -(residual_sum(theta) - reference) / (2.0 * spec_.sigma * spec_.sigma);
    return std::min(0.0, value);
  }
  // The coin likelihood has a closed-form maximizer, so both modes coincide.
  double total = 0.0;
  for (std::size_t coin = 0; coin < heads_.size(); ++coin) {
    const double p = theta[static_cast<Eigen::Index>(coin)];
    const double h = static_cast<double>(heads_[coin]);
    const double t = static_cast<double>(tails_[coin]);
    const double n = h + t;
    if (n == 0.0) continue;
    // Pairwise differences cancel exactly at the maximizer.
    total += (xlogy(h, p) - xlogy(h, h / n)) + (xlogy(t, 1.0 - p) - xlogy(t, 1.0 - h / n));
  }
  return std::min(0.0, total);
}

double log_likelihood(const ModelSpec& spec, const Dataset& data, const Vector& theta) {
  return ObservedModel(spec, data).log_likelihood(theta);
}

double relative_log_likelihood(const ModelSpec& spec, const Dataset& data, const Vector& theta,
                               LikelihoodMode mode, const MleResult* mle) {
  std::optional<MleResult> cached;
  if (mle) cached = *mle;
  return ObservedModel(spec, data, cached).relative_log_likelihood(theta, mode);
}

// ---------------------------------------------------------------------------
// Sampling and fitting

Dataset sample_data(const ModelSpec& spec, const Vector& theta, std::size_t count, RandomStream& stream) {
  spec.validate();
  if (!spec.box.contains(theta)) throw DomainError("sample_data: parameter lies outside the box");
  if (count == 0) throw DomainError("sample_data: need at least one sample");
  Dataset data;
  switch (spec.kind) {
    case ModelKind::bernoulli_coins: {
      if (spec.tosses.size() != spec.parameter_dimension()) {
        throw DomainError("sample_data: coin model needs toss counts");
      }
      for (std::size_t rep = 0; rep < count; ++rep) {
        for (std::size_t coin = 0; coin < spec.tosses.size(); ++coin) {
          for (std::size_t i = 0; i < spec.tosses[coin]; ++i) {
            Vector row(2);
            row << static_cast<double>(coin),
                static_cast<double>(stream.bernoulli(theta[static_cast<Eigen::Index>(coin)]));
            data.samples.push_back(row);
          }
        }
      }
      return data;
    }
    case ModelKind::gaussian_mean:
    case ModelKind::gaussian_noise: {
      const Vector m = spec.kind == ModelKind::gaussian_mean ? theta : spec.measurement.evaluate(theta);
      for (std::size_t rep = 0; rep < count; ++rep) {
        Vector x(m.size());
        for (Eigen::Index j = 0; j < m.size(); ++j) x[j] = m[j] + spec.sigma * stream.standard_normal();
        data.samples.push_back(std::move(x));
      }
      if (spec.kind == ModelKind::gaussian_noise) data.times = spec.measurement.time_grid();
      return data;
    }
  }
  return data;
}

MleResult find_mle(const ModelSpec& spec, const Dataset& data, RandomStream& stream, std::size_t budget,
                   std::span<const Vector> seeds) {
  const ObservedModel observed(spec, data);
  MleResult result;
  switch (spec.kind) {
    case ModelKind::gaussian_mean: {
      Vector mean = Vector::Zero(static_cast<Eigen::Index>(data.dimension()));
      for (const Vector& x : data.samples) mean += x;
      mean /= static_cast<double>(data.sample_count());
      result.theta = spec.box.clamp(mean);
      result.evaluations = 1;
      break;
    }
    case ModelKind::bernoulli_coins: {
      result.theta = spec.box.center();
      for (std::size_t coin = 0; coin < observed.heads().size(); ++coin) {
        const double n = static_cast<double>(observed.heads()[coin] + observed.tails()[coin]);
        if (n > 0.0) result.theta[static_cast<Eigen::Index>(coin)] = static_cast<double>(observed.heads()[coin]) / n;
      }
      result.theta = spec.box.clamp(result.theta);
      result.evaluations = 1;
      break;
    }
    case ModelKind::gaussian_noise: {
      const Objective residual = [&](const Vector& theta) { return observed.residual_sum(theta); };
      const Vector start = spec.box.center();
      const double start_value = residual(start);
      std::vector<Vector> initial{start};
      initial.insert(initial.end(), seeds.begin(), seeds.end());

      DEConfig config;
      config.restarts = 1;
      const std::size_t polish_budget = std::max<std::size_t>(budget / 5, 50);
      const std::size_t de_budget = budget > polish_budget ? budget - polish_budget : budget;
      config.max_generations = std::max<std::size_t>(1, de_budget / config.population_for(spec.parameter_dimension()));
      const DEResult de = minimize_de(residual, spec.box, config, stream, initial, de_budget);
      const DEResult polished = polish_compass(residual, spec.box, de.best, 1e-3, 1e-13, polish_budget);
      const DEResult& best = polished.value <= de.value ? polished : de;
      result.theta = best.best;
      result.evaluations = de.evaluations + polished.evaluations + 1;
      result.warning = !(best.value < start_value);
      break;
    }
  }
  result.log_likelihood = observed.log_likelihood(result.theta);
  result.residual_sum = observed.is_gaussian() ? observed.residual_sum(result.theta)
                                               : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace fourthkind
