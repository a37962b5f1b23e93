#include "fourthkind/cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fourthkind/error.hpp"
#include "fourthkind/io.hpp"

namespace fourthkind {

namespace {

constexpr double kSweepBetaLow = 1e-3;
constexpr std::size_t kSweepPoints = 8;

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double x : values) v[i++] = x;
  return v;
}

int resolved_dof(const Scenario& s) {
  if (s.calibration.dof > 0) return s.calibration.dof;
  if (s.calibration.method == BetaMethod::gaussian_surrogate) {
    return static_cast<int>(s.spec.observation_dimension());
  }
  return static_cast<int>(s.spec.parameter_dimension());
}

int resolved_samples(const Scenario& s, const ObservedModel& observed) {
  if (s.calibration.samples > 0) return s.calibration.samples;
  if (s.spec.kind == ModelKind::bernoulli_coins) return 1;
  return static_cast<int>(observed.data().sample_count());
}

MonteCarloConfig monte_carlo_config(const Scenario& s, const ObservedModel& observed, RandomStream& stream) {
  MonteCarloConfig config;
  RandomStream grid_stream = stream.split("theta-grid");
  config.theta_grid = theta_grid_from_spec(s.calibration.theta_grid, s.spec.box, observed.require_mle().theta,
                                           grid_stream);
  config.trials = s.calibration.trials;
  config.samples = s.spec.kind == ModelKind::bernoulli_coins ? 1 : observed.data().sample_count();
  config.mode = s.mode;
  config.mle_budget = s.calibration.mle_budget;
  return config;
}

std::vector<double> split_fields(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(':', start), text.size());
    const std::string field(text.substr(start, end - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != field.size()) throw DomainError("invalid theta grid field '" + field + "'");
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

}  // namespace

void Scenario::validate() const {
  spec.validate();
  if (static_cast<std::size_t>(truth.size()) != spec.parameter_dimension() || !spec.box.contains(truth)) {
    throw DomainError("scenario truth must lie in the parameter box");
  }
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw DomainError("scenario beta_star must lie in (0, 1)");
  if (alpha && !(*alpha >= 0.0 && std::isfinite(*alpha))) throw DomainError("scenario alpha must be >= 0");
  if (samples == 0) throw DomainError("scenario needs at least one sample");
  for (const double b : risk_betas) {
    if (!(b > 0.0 && b <= 1.0)) throw DomainError("risk sweep betas must lie in (0, 1]");
  }
  game.validate();
}

std::vector<std::string> builtin_scenario_names() {
  return {"gaussian-mean", "coin-1", "coin-2", "lotka-volterra", "quadratic"};
}

Scenario builtin_scenario(std::string_view name) {
  Scenario s;
  s.name = std::string(name);
  if (name == "gaussian-mean") {
    s.description = "Scalar Gaussian mean on [-3, 3] with sigma = 1 and one observation x = 1.5";
    s.spec.kind = ModelKind::gaussian_mean;
    s.spec.box = ParameterBox(vec({-3.0}), vec({3.0}));
    s.spec.sigma = 1.0;
    s.truth = vec({1.5});
    s.data = Dataset{{vec({1.5})}, {}};
    s.mode = LikelihoodMode::surrogate;
    s.calibration.method = BetaMethod::gaussian_surrogate;
    s.calibration.dof = 1;
    s.calibration.samples = 1;
  } else if (name == "coin-1") {
    s.description = "One coin tossed 5 times: 4 heads, 1 tail";
    s.spec.kind = ModelKind::bernoulli_coins;
    s.spec.box = ParameterBox(vec({0.0}), vec({1.0}));
    s.spec.tosses = {5};
    s.truth = vec({0.8});
    const std::size_t heads[] = {4};
    const std::size_t tails[] = {1};
    s.data = coin_dataset(heads, tails);
    s.calibration.method = BetaMethod::asymptotic;
  } else if (name == "coin-2") {
    s.description = "Two coins: 1 head and 3 tails, then 5 heads and 1 tail";
    s.spec.kind = ModelKind::bernoulli_coins;
    s.spec.box = ParameterBox(vec({0.0, 0.0}), vec({1.0, 1.0}));
    s.spec.tosses = {4, 6};
    s.truth = vec({0.25, 5.0 / 6.0});
    const std::size_t heads[] = {1, 5};
    const std::size_t tails[] = {3, 1};
    s.data = coin_dataset(heads, tails);
    s.calibration.method = BetaMethod::asymptotic;
  } else if (name == "lotka-volterra") {
    s.description = "Predator-prey growth rates from one noisy trajectory (200 steps to t = 20, sigma = 5)";
    s.spec.kind = ModelKind::gaussian_noise;
    s.spec.box = ParameterBox(vec({-5.0, -5.0}), vec({5.0, 5.0}));
    s.spec.sigma = 5.0;
    s.spec.measurement = MeasurementFunction(LotkaVolterraMeasurement{});
    s.truth = vec({0.55, 0.8});
    s.data_seed = 20505;
    s.calibration.method = BetaMethod::asymptotic;
    s.calibration.dof = 2;
    s.calibration.theta_grid = "local:5:0.05";
  } else if (name == "quadratic") {
    s.description = "Quadratic curve coefficients from 100 noisy points on (0, 5), sigma^2 = 10";
    s.spec.kind = ModelKind::gaussian_noise;
    s.spec.box = ParameterBox(vec({-30.0, -30.0, -30.0}), vec({30.0, 30.0, 30.0}));
    s.spec.sigma = std::sqrt(10.0);
    s.spec.measurement = MeasurementFunction(QuadraticMeasurement{});
    s.truth = vec({1.0, 0.5, 1.0});
    s.data_seed = 50101;
    s.mode = LikelihoodMode::surrogate;
    s.calibration.method = BetaMethod::gaussian_surrogate;
    s.calibration.dof = 100;
    s.calibration.samples = 1;
  } else {
    throw DomainError("unknown scenario '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

Dataset scenario_data(const Scenario& scenario) {
  if (scenario.data) return *scenario.data;
  if (!scenario.data_file.empty()) return read_dataset_csv(scenario.data_file, scenario.spec);
  RandomStream stream(scenario.data_seed);
  return sample_data(scenario.spec, scenario.truth, scenario.samples, stream);
}

std::shared_ptr<const ObservedModel> observe(const Scenario& scenario, RandomStream& stream) {
  RandomStream fit = stream.split("mle");
  return std::make_shared<const ObservedModel>(
      ObservedModel::fitted(scenario.spec, scenario_data(scenario), fit, kDefaultMleBudget));
}

std::vector<Vector> theta_grid_from_spec(std::string_view text, const ParameterBox& box, const Vector& mle,
                                         RandomStream& stream) {
  const std::size_t colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  const std::vector<double> fields =
      colon == std::string_view::npos ? std::vector<double>{} : split_fields(text.substr(colon + 1));
  auto positive_count = [](double value) {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e6) {
      throw DomainError("theta grid counts must be positive integers");
    }
    return static_cast<std::size_t>(value);
  };
  if (kind == "lhs") {
    const std::size_t count = fields.empty() ? kDefaultThetaGridSize : positive_count(fields.at(0));
    if (fields.size() > 1) throw DomainError("theta grid 'lhs' takes one field");
    return default_theta_grid(box, mle, stream, count);
  }
  if (kind == "local") {
    if (fields.size() != 2 || !(fields[1] > 0.0)) {
      throw DomainError("theta grid 'local' needs PER_AXIS:HALF_WIDTH with a positive half width");
    }
    const std::size_t per_axis = positive_count(fields[0]);
    const double half = fields[1];
    const std::size_t k = box.dimension();
    std::vector<Vector> grid;
    std::vector<std::size_t> index(k, 0);
    while (true) {
      Vector theta(static_cast<Eigen::Index>(k));
      for (std::size_t d = 0; d < k; ++d) {
        const double offset =
            per_axis == 1 ? 0.0 : -half + 2.0 * half * static_cast<double>(index[d]) / static_cast<double>(per_axis - 1);
        theta[static_cast<Eigen::Index>(d)] = mle[static_cast<Eigen::Index>(d)] + offset;
      }
      grid.push_back(box.clamp(theta));
      std::size_t d = 0;
      while (d < k && ++index[d] == per_axis) index[d++] = 0;
      if (d == k) break;
    }
    grid.push_back(box.clamp(mle));
    return grid;
  }
  throw DomainError("unknown theta grid '" + std::string(text) + "' (expected lhs:COUNT or local:N:HALF_WIDTH)");
}

BetaCurve scenario_beta_curve(const Scenario& scenario, const ObservedModel& observed,
                              std::span<const double> alphas, RandomStream& stream) {
  switch (scenario.calibration.method) {
    case BetaMethod::asymptotic:
      return beta_curve_asymptotic(resolved_dof(scenario), alphas);
    case BetaMethod::gaussian_surrogate:
      return beta_curve_gaussian_surrogate(resolved_dof(scenario), resolved_samples(scenario, observed), alphas);
    case BetaMethod::monte_carlo: {
      const MonteCarloConfig config = monte_carlo_config(scenario, observed, stream);
      RandomStream sim = stream.split("simulation");
      return beta_curve_monte_carlo(scenario.spec, alphas, config, sim);
    }
  }
  throw DomainError("unknown significance method");
}

double scenario_beta(const Scenario& scenario, const ObservedModel& observed, double alpha, RandomStream& stream) {
  const double alphas[] = {alpha};
  return scenario_beta_curve(scenario, observed, alphas, stream).points.front().beta;
}

double calibrate_alpha(const Scenario& scenario, const ObservedModel& observed, double beta_star,
                       RandomStream& stream) {
  switch (scenario.calibration.method) {
    case BetaMethod::asymptotic:
      return alpha_for_beta_asymptotic(resolved_dof(scenario), beta_star);
    case BetaMethod::gaussian_surrogate:
      return alpha_for_beta_gaussian_surrogate(resolved_dof(scenario), resolved_samples(scenario, observed),
                                               beta_star);
    case BetaMethod::monte_carlo: {
      const std::vector<double> grid = default_alpha_grid();
      return alpha_for_beta(scenario_beta_curve(scenario, observed, grid, stream), beta_star);
    }
  }
  throw DomainError("unknown significance method");
}

GameSolution solve_scenario(const Scenario& scenario, const std::shared_ptr<const ObservedModel>& observed,
                            RandomStream& stream) {
  double alpha = 0.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  if (scenario.alpha) {
    alpha = *scenario.alpha;
    if (scenario.calibration.method != BetaMethod::monte_carlo && alpha > 0.0 && alpha <= 1.0) {
      RandomStream unused = stream.split("calibration");
      beta = scenario_beta(scenario, *observed, alpha, unused);
    }
  } else {
    RandomStream calibration = stream.split("calibration");
    alpha = calibrate_alpha(scenario, *observed, scenario.beta_star, calibration);
    beta = scenario.beta_star;
  }
  const LikelihoodRegion region(observed, alpha, scenario.mode);
  RandomStream game = stream.split("game");
  GameSolution solution = solve_game(region, scenario.spec.qoi, scenario.game, game);
  solution.beta = beta;
  return solution;
}

std::vector<double> default_risk_betas(const Scenario& scenario, const ObservedModel& observed,
                                       RandomStream& stream) {
  const double alpha_max = max_nonempty_alpha(observed, scenario.mode);
  const double beta_hi = scenario_beta(scenario, observed, alpha_max, stream);
  if (!(beta_hi > kSweepBetaLow)) throw CalibrationError("significance range too narrow for a risk sweep");
  std::vector<double> betas(kSweepPoints);
  for (std::size_t i = 0; i < kSweepPoints; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(kSweepPoints - 1);
    betas[i] = kSweepBetaLow * std::pow(beta_hi / kSweepBetaLow, t);
  }
  betas.back() = beta_hi;
  return betas;
}

std::vector<RiskRow> risk_sweep(const Scenario& scenario, const std::shared_ptr<const ObservedModel>& observed,
                                std::span<const double> betas, RandomStream& stream) {
  const double alpha_max = max_nonempty_alpha(*observed, scenario.mode);
  RandomStream probe = stream.split("beta-max");
  const double beta_hi = scenario_beta(scenario, *observed, alpha_max, probe);
  std::vector<RiskRow> rows;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    RiskRow row;
    row.beta = betas[i];
    RandomStream point = stream.split(static_cast<std::uint64_t>(i));
    try {
      if (betas[i] >= beta_hi) {
        // At or past the top of the attainable significance range the
        // largest nonempty region is used; beyond it the region is empty.
        if (betas[i] > beta_hi * (1.0 + 1e-12)) throw InfeasibleError("target significance above attainable range");
        row.alpha = alpha_max;
      } else {
        RandomStream calibration = point.split("calibration");
        row.alpha = calibrate_alpha(scenario, *observed, betas[i], calibration);
      }
      const LikelihoodRegion region(observed, row.alpha, scenario.mode);
      RandomStream game = point.split("game");
      row.solution = solve_game(region, scenario.spec.qoi, scenario.game, game);
      row.solution->beta = row.beta;
    } catch (const Error& e) {
      row.error = std::string(to_string(e.category()));
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RegionSample> region_samples(const LikelihoodRegion& region, RandomStream& stream) {
  const ParameterBox& box = region.spec().box;
  const std::size_t k = box.dimension();
  std::vector<Vector> points;
  if (k <= 2) {
    const std::size_t per_axis = k == 1 ? 201 : 61;
    std::vector<std::size_t> index(k, 0);
    while (true) {
      Vector theta(static_cast<Eigen::Index>(k));
      for (std::size_t d = 0; d < k; ++d) {
        const auto e = static_cast<Eigen::Index>(d);
        theta[e] = box.lower()[e] + box.width()[e] * static_cast<double>(index[d]) / static_cast<double>(per_axis - 1);
      }
      points.push_back(theta);
      std::size_t d = 0;
      while (d < k && ++index[d] == per_axis) index[d++] = 0;
      if (d == k) break;
    }
  } else {
    points = latin_hypercube(box, 512, stream);
  }
  std::vector<RegionSample> samples;
  samples.reserve(points.size());
  for (Vector& theta : points) {
    RegionSample s;
    s.log_relative = region.observed().relative_log_likelihood(theta, region.mode());
    s.inside = region.contains(theta);
    s.theta = std::move(theta);
    samples.push_back(std::move(s));
  }
  return samples;
}

ScenarioReport run_scenario(const Scenario& scenario, RandomStream& stream, const RunOptions& options) {
  scenario.validate();
  ScenarioReport report;
  report.scenario = scenario;
  const auto observed = observe(scenario, stream);
  report.data = observed->data();
  report.mle = observed->require_mle();
  if (options.beta_curve) {
    RandomStream sub = stream.split("beta-curve");
    const std::vector<double> grid = default_alpha_grid();
    report.beta_curve = scenario_beta_curve(scenario, *observed, grid, sub);
  }
  RandomStream solve = stream.split("solve");
  report.solution = solve_scenario(scenario, observed, solve);
  if (options.risk_curve) {
    RandomStream sub = stream.split("risk");
    std::vector<double> betas = scenario.risk_betas;
    if (betas.empty()) {
      RandomStream grid = sub.split("grid");
      betas = default_risk_betas(scenario, *observed, grid);
    }
    report.risk_curve = risk_sweep(scenario, observed, betas, sub);
  }
  if (options.region) {
    RandomStream sub = stream.split("region");
    const LikelihoodRegion region(observed, report.solution.alpha, scenario.mode);
    report.region = region_samples(region, sub);
  }
  return report;
}

}  // namespace fourthkind
