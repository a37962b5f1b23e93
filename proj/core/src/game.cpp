#include "fourthkind/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "fourthkind/nnls.hpp"

namespace fourthkind {

namespace {

constexpr double kWeightTolerance = 1e-12;
constexpr double kHullTolerance = 1e-8;

struct WorkingPoint {
  Vector theta;
  Vector phi;
};

// Moves along null directions of [Z; 1^T] to the vertex of the feasible
// weight polytope with the largest sum w_i |z_i|^2 (the variance is linear
// there because the mean is pinned).
void maximize_variance(std::span<const Vector> points, Vector& w) {
  const auto m = static_cast<Eigen::Index>(points.size());
  const auto dim = points.front().size();
  Matrix constraints(dim + 1, m);
  Vector norms(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    constraints.col(i).head(dim) = points[static_cast<std::size_t>(i)];
    constraints(dim, i) = 1.0;
    norms[i] = points[static_cast<std::size_t>(i)].squaredNorm();
  }
  Eigen::FullPivLU<Matrix> lu(constraints);
  lu.setThreshold(1e-10);
  const Matrix kernel = lu.kernel();
  if (lu.dimensionOfKernel() == 0) return;
  const double scale = 1.0 + norms.maxCoeff();
  for (Eigen::Index pass = 0; pass < m; ++pass) {
    bool moved = false;
    for (Eigen::Index j = 0; j < kernel.cols(); ++j) {
      Vector v = kernel.col(j);
      double slope = v.dot(norms);
      if (std::abs(slope) <= 1e-12 * scale * v.lpNorm<1>()) continue;
      if (slope < 0.0) {
        v = -v;
        slope = -slope;
      }
      double step = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (v[i] < 0.0) step = std::min(step, w[i] / -v[i]);
      }
      if (!(step > 0.0) || !std::isfinite(step)) continue;
      w += step * v;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (w[i] < kWeightTolerance) w[i] = 0.0;
      }
      moved = true;
    }
    if (!moved) break;
  }
}

}  // namespace

void DiscreteMeasure::validate() const {
  if (atoms.empty()) throw DomainError("discrete measure has no atoms");
  double total = 0.0;
  for (const Atom& a : atoms) {
    if (!(a.weight >= 0.0)) throw DomainError("discrete measure has a negative weight");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete measure weights do not sum to 1");
}

Vector DiscreteMeasure::mean() const {
  if (atoms.empty()) throw DomainError("mean of an empty measure");
  Vector m = Vector::Zero(atoms.front().phi.size());
  for (const Atom& a : atoms) m += a.weight * a.phi;
  return m;
}

double variance_of(const DiscreteMeasure& measure) {
  const Vector m = measure.mean();
  double v = 0.0;
  for (const Atom& a : measure.atoms) v += a.weight * (a.phi - m).squaredNorm();
  return v;
}

double variance_of(const DiscreteMeasure& measure, const QuantityOfInterest& qoi) {
  DiscreteMeasure mapped = measure;
  for (Atom& a : mapped.atoms) a.phi = qoi(a.theta);
  return variance_of(mapped);
}

void GameConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw DomainError("delta must be >= 0");
  de.validate();
  merit.validate();
}

std::size_t iteration_cap(double epsilon, double delta) {
  return static_cast<std::size_t>(std::ceil(16.0 / (epsilon * epsilon) * (1.0 + 2.0 * delta)));
}

std::size_t working_set_cap(double epsilon, double delta, std::size_t decision_dimension) {
  return std::min(2 + iteration_cap(epsilon, delta), decision_dimension + 2);
}

Vector solve_weights(std::span<const Vector> points, const Vector& center) {
  if (points.empty()) throw DomainError("solve_weights needs at least one point");
  const auto dim = center.size();
  const auto m = static_cast<Eigen::Index>(points.size());
  double kappa = 1.0;
  for (const Vector& z : points) {
    if (z.size() != dim) throw DomainError("solve_weights: points differ in dimension from the center");
    kappa = std::max(kappa, (z - center).norm());
  }
  Matrix a(dim + 1, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.col(i).head(dim) = points[static_cast<std::size_t>(i)] - center;
    a(dim, i) = kappa;
  }
  Vector b = Vector::Zero(dim + 1);
  b[dim] = kappa;
  Vector w = nonnegative_least_squares(a, b).x;
  const double total = w.sum();
  if (!(total > 0.0)) throw InconsistentSupportError("support weights vanish");
  w /= total;
  maximize_variance(points, w);
  w /= w.sum();

  Vector mean = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < m; ++i) mean += w[i] * points[static_cast<std::size_t>(i)];
  const double miss = (mean - center).norm();
  if (miss > kHullTolerance * (1.0 + center.norm())) {
    throw InconsistentSupportError("center lies outside the convex hull of the support (miss " +
                                   std::to_string(miss) + ")");
  }
  return w;
}

GameSolution solve_game(const LikelihoodRegion& region, const QuantityOfInterest& qoi, const GameConfig& config,
                        RandomStream& stream) {
  config.validate();
  const std::size_t n = qoi.output_dimension(region.spec().parameter_dimension());
  if (n > kMaxMiniballDimension) throw DomainError("decision dimension exceeds the miniball limit");
  const std::size_t cap = iteration_cap(config.epsilon, config.delta);
  const std::size_t set_cap = working_set_cap(config.epsilon, config.delta, n);

  std::size_t oracle_calls = 0;
  auto oracle = [&](const Vector& c, const std::vector<WorkingPoint>& known) {
    std::vector<Vector> seeds;
    for (const WorkingPoint& p : known) seeds.push_back(p.theta);
    RandomStream sub = stream.split("oracle-" + std::to_string(oracle_calls++));
    return farthest_point(region, qoi, c, config.de, config.merit, sub, seeds);
  };

  // Approximate diameter pair.
  const FarthestResult first = oracle(qoi(region.mle_theta()), {});
  std::vector<WorkingPoint> working{{first.theta, first.phi}};
  const FarthestResult second = oracle(first.phi, working);
  working.push_back({second.theta, second.phi});

  GameSolution solution;
  solution.alpha = region.alpha();
  solution.beta = std::numeric_limits<double>::quiet_NaN();
  solution.epsilon = config.epsilon;
  solution.delta = config.delta;
  solution.seed = stream.seed();
  solution.max_working_set = working.size();

  std::vector<Vector> images;
  Ball ball;
  double last_distance = 0.0;
  for (std::size_t iteration = 1;; ++iteration) {
    if (iteration > cap) {
      throw NonconvergedError("miniball iteration exceeded its cap of " + std::to_string(cap), solution.trace);
    }
    images.clear();
    for (const WorkingPoint& p : working) images.push_back(p.phi);
    ball = miniball_exact(images).ball;
    const SupportSet pruned = prune_support(images, ball);
    std::vector<WorkingPoint> kept;
    for (const std::size_t index : pruned.indices) kept.push_back(working[index]);

    TraceEntry entry;
    entry.iteration = iteration;
    entry.working_set = working.size();
    entry.support = kept.size();
    entry.radius = ball.radius;
    entry.center = ball.center;
    working = std::move(kept);

    const FarthestResult next = oracle(ball.center, working);
    entry.distance = next.distance;
    solution.trace.push_back(entry);
    solution.iterations = iteration;
    last_distance = next.distance;
    if (next.distance <= (1.0 + config.epsilon) * ball.radius) break;

    working.push_back({next.theta, next.phi});
    solution.max_working_set = std::max(solution.max_working_set, working.size());
    if (working.size() > set_cap) throw StateError("working set exceeded its bound");
  }

  images.clear();
  for (const WorkingPoint& p : working) images.push_back(p.phi);
  const Vector w = solve_weights(images, ball.center);
  for (std::size_t i = 0; i < working.size(); ++i) {
    const double weight = w[static_cast<Eigen::Index>(i)];
    if (weight > 0.0) solution.measure.atoms.push_back({weight, working[i].theta, working[i].phi});
  }
  double total = 0.0;
  for (const Atom& a : solution.measure.atoms) total += a.weight;
  for (Atom& a : solution.measure.atoms) a.weight /= total;

  solution.decision = ball.center;
  solution.raw_radius = ball.radius;
  solution.risk = ball.radius * ball.radius;
  solution.enlarged_radius = (1.0 + config.epsilon) * (1.0 + config.delta) * ball.radius;
  const double cover = (1.0 + config.delta) * std::max(ball.radius, last_distance);
  solution.risk_upper = cover * cover;
  solution.variance = variance_of(solution.measure);
  solution.gap = solution.risk_upper - solution.variance;
  return solution;
}

Certificate certificate(const GameSolution& solution) {
  return {solution.variance, solution.risk_upper, solution.risk_upper - solution.variance};
}

}  // namespace fourthkind
