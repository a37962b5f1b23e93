#include "fourthkind/significance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

void check_beta_star(double beta_star) {
  if (!(beta_star > 0.0 && beta_star < 1.0)) throw DomainError("target significance must lie in (0, 1)");
}

double surrogate_factor(int n) {
  if (n < 1) throw DomainError("sample count N must be >= 1");
  const double two_n = 2.0 * static_cast<double>(n);
  return two_n / (two_n - 1.0);
}

// Log relative likelihood at the generating theta of one simulated dataset.
double simulated_log_relative(const ModelSpec& spec, const Vector& theta, const MonteCarloConfig& config,
                              RandomStream& stream) {
  Dataset data = sample_data(spec, theta, config.samples, stream);
  if (config.mode == LikelihoodMode::surrogate || spec.kind == ModelKind::bernoulli_coins) {
    return ObservedModel(spec, std::move(data)).relative_log_likelihood(theta, config.mode);
  }
  const Vector seeds[] = {theta};
  RandomStream fit = stream.split("mle");
  const ObservedModel observed = ObservedModel::fitted(spec, std::move(data), fit, config.mle_budget, seeds);
  return observed.relative_log_likelihood(theta, LikelihoodMode::exact);
}

// Per grid point, the log relative likelihoods of all trials.
std::vector<std::vector<double>> simulate(const ModelSpec& spec, const MonteCarloConfig& config,
                                          RandomStream& stream) {
  config.validate(spec);
  std::vector<std::vector<double>> logs(config.theta_grid.size());
  parallel_for(config.theta_grid.size(), [&](std::size_t i) {
    const RandomStream point = stream.split(static_cast<std::uint64_t>(i));
    std::vector<double>& out = logs[i];
    out.resize(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
      RandomStream trial = point.split(static_cast<std::uint64_t>(t));
      out[t] = simulated_log_relative(spec, config.theta_grid[i], config, trial);
    }
  });
  return logs;
}

BetaEstimate estimate(const std::vector<std::vector<double>>& logs, double alpha, std::size_t trials) {
  const double log_alpha = std::log(alpha);
  BetaEstimate best;
  best.beta = -1.0;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    const auto excluded = std::count_if(logs[i].begin(), logs[i].end(), [&](double v) { return v < log_alpha; });
    const double p = static_cast<double>(excluded) / static_cast<double>(trials);
    if (p > best.beta) {
      best.beta = p;
      best.argmax = i;
    }
  }
  best.standard_error = std::sqrt(best.beta * (1.0 - best.beta) / static_cast<double>(trials));
  best.warning = trials < kMinimumTrials;
  return best;
}

}  // namespace

std::string_view to_string(BetaMethod method) {
  switch (method) {
    case BetaMethod::monte_carlo: return "monte-carlo";
    case BetaMethod::asymptotic: return "asymptotic";
    case BetaMethod::gaussian_surrogate: return "gaussian-surrogate";
  }
  return "unknown";
}

BetaMethod parse_beta_method(std::string_view text) {
  if (text == "monte-carlo" || text == "mc") return BetaMethod::monte_carlo;
  if (text == "asymptotic") return BetaMethod::asymptotic;
  if (text == "gaussian-surrogate" || text == "surrogate") return BetaMethod::gaussian_surrogate;
  throw DomainError("unknown significance method '" + std::string(text) + "'");
}

double beta_asymptotic(int k, double alpha) {
  check_alpha(alpha);
  return chi2_sf(k, -2.0 * std::log(alpha));
}

double beta_gaussian_surrogate(int r, int n, double alpha) {
  check_alpha(alpha);
  return chi2_sf(r, -surrogate_factor(n) * std::log(alpha));
}

void MonteCarloConfig::validate(const ModelSpec& spec) const {
  if (theta_grid.empty()) throw DomainError("Monte Carlo needs a nonempty theta grid");
  if (trials == 0) throw DomainError("Monte Carlo needs at least one trial");
  if (samples == 0) throw DomainError("Monte Carlo needs at least one sample per dataset");
  for (const Vector& theta : theta_grid) {
    if (!spec.box.contains(theta)) throw DomainError("theta grid point lies outside the parameter box");
  }
}

std::vector<Vector> default_theta_grid(const ParameterBox& box, const Vector& anchor, RandomStream& stream,
                                       std::size_t count) {
  std::vector<Vector> grid = latin_hypercube(box, count, stream);
  grid.push_back(box.clamp(anchor));
  return grid;
}

std::vector<double> default_alpha_grid() {
  constexpr int kPoints = 64;
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) grid[i] = std::pow(10.0, -6.0 + 6.0 * i / (kPoints - 1));
  grid.back() = 1.0;
  return grid;
}

BetaEstimate beta_monte_carlo(const ModelSpec& spec, double alpha, const MonteCarloConfig& config,
                              RandomStream& stream) {
  check_alpha(alpha);
  return estimate(simulate(spec, config, stream), alpha, config.trials);
}

BetaEstimate beta_coin_enumeration(const ModelSpec& spec, double alpha, std::span<const Vector> theta_grid,
                                   std::size_t samples) {
  check_alpha(alpha);
  spec.validate();
  if (spec.kind != ModelKind::bernoulli_coins) throw DomainError("enumeration needs a coin model");
  if (theta_grid.empty()) throw DomainError("enumeration needs a nonempty theta grid");
  if (samples == 0) throw DomainError("enumeration needs at least one sample");
  std::vector<std::size_t> tosses = spec.tosses;
  double outcomes = 1.0;
  for (std::size_t& n : tosses) {
    n *= samples;
    outcomes *= static_cast<double>(n + 1);
  }
  if (outcomes > 1e7) throw DomainError("coin outcome space too large to enumerate");

  const double log_alpha = std::log(alpha);
  BetaEstimate best;
  best.beta = -1.0;
  const std::size_t coins = tosses.size();
  for (std::size_t g = 0; g < theta_grid.size(); ++g) {
    const Vector& theta = theta_grid[g];
    if (!spec.box.contains(theta)) throw DomainError("theta grid point lies outside the parameter box");
    std::vector<std::size_t> heads(coins, 0);
    std::vector<std::size_t> tails(coins);
    double excluded = 0.0;
    while (true) {
      double log_prob = 0.0;
      for (std::size_t c = 0; c < coins; ++c) {
        tails[c] = tosses[c] - heads[c];
        const double n = static_cast<double>(tosses[c]);
        const double h = static_cast<double>(heads[c]);
        const double p = theta[static_cast<Eigen::Index>(c)];
        const double log_choose = std::lgamma(n + 1.0) - std::lgamma(h + 1.0) - std::lgamma(n - h + 1.0);
        const double lp = (h > 0.0 ? h * std::log(p) : 0.0) + (n - h > 0.0 ? (n - h) * std::log1p(-p) : 0.0);
        log_prob += log_choose + lp;
      }
      if (log_prob > -std::numeric_limits<double>::infinity()) {
        const ObservedModel observed(spec, coin_dataset(heads, tails));
        if (observed.relative_log_likelihood(theta, LikelihoodMode::exact) < log_alpha) {
          excluded += std::exp(log_prob);
        }
      }
      std::size_t c = 0;
      while (c < coins && ++heads[c] > tosses[c]) heads[c++] = 0;
      if (c == coins) break;
    }
    if (excluded > best.beta) {
      best.beta = std::min(1.0, excluded);
      best.argmax = g;
    }
  }
  return best;
}

BetaCurve beta_curve_monte_carlo(const ModelSpec& spec, std::span<const double> alphas,
                                 const MonteCarloConfig& config, RandomStream& stream) {
  for (const double a : alphas) check_alpha(a);
  const auto logs = simulate(spec, config, stream);
  BetaCurve curve;
  curve.method = BetaMethod::monte_carlo;
  curve.theta_grid = config.theta_grid;
  curve.trials = config.trials;
  curve.samples = config.samples;
  curve.seed = stream.seed();
  curve.warning = config.trials < kMinimumTrials;
  for (const double a : alphas) {
    const BetaEstimate e = estimate(logs, a, config.trials);
    curve.points.push_back({a, e.beta, e.standard_error});
  }
  return curve;
}

BetaCurve beta_curve_asymptotic(int k, std::span<const double> alphas) {
  BetaCurve curve;
  curve.method = BetaMethod::asymptotic;
  for (const double a : alphas) curve.points.push_back({a, beta_asymptotic(k, a), 0.0});
  return curve;
}

BetaCurve beta_curve_gaussian_surrogate(int r, int n, std::span<const double> alphas) {
  BetaCurve curve;
  curve.method = BetaMethod::gaussian_surrogate;
  curve.samples = static_cast<std::size_t>(std::max(n, 0));
  for (const double a : alphas) curve.points.push_back({a, beta_gaussian_surrogate(r, n, a), 0.0});
  return curve;
}

double alpha_for_beta_asymptotic(int k, double beta_star) {
  check_beta_star(beta_star);
  return std::exp(-0.5 * chi2_quantile(k, 1.0 - beta_star));
}

double alpha_for_beta_gaussian_surrogate(int r, int n, double beta_star) {
  check_beta_star(beta_star);
  return std::exp(-chi2_quantile(r, 1.0 - beta_star) / surrogate_factor(n));
}

double alpha_for_beta(const BetaCurve& curve, double beta_star) {
  check_beta_star(beta_star);
  double best = -1.0;
  for (const BetaPoint& p : curve.points) {
    if (p.beta + 2.0 * p.standard_error <= beta_star) best = std::max(best, p.alpha);
  }
  if (best < 0.0) throw CalibrationError("no alpha on the grid meets the target significance");
  return best;
}

}  // namespace fourthkind
