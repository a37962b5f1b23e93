#include "fourthkind/farthest.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kUnchanged = 1e-10;
constexpr double kPolishStart = 1e-2;
constexpr double kPolishEnd = 1e-12;

// Best feasible point seen by any evaluation; objectives feed it as a side
// effect, which stays deterministic because evaluation order is fixed.
struct Incumbent {
  Vector theta;
  Vector phi;
  double squared = -kInf;

  void offer(const Vector& t, Vector p, double d2) {
    if (d2 > squared) {
      theta = t;
      phi = std::move(p);
      squared = d2;
    }
  }
  bool found() const { return squared > -kInf; }
};

}  // namespace

void MeritConfig::validate() const {
  if (!(initial_mu > 0.0) || !std::isfinite(initial_mu)) throw DomainError("merit mu must be positive");
  if (!(growth > 1.0) || !std::isfinite(growth)) throw DomainError("merit growth factor must exceed 1");
  if (!(mu_cap >= initial_mu) || !std::isfinite(mu_cap)) throw DomainError("merit mu cap must be >= initial mu");
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) throw DomainError("feasibility tolerance must be >= 0");
}

FarthestResult farthest_point(const LikelihoodRegion& region, const QuantityOfInterest& qoi, const Vector& c,
                              const DEConfig& de, const MeritConfig& merit, RandomStream& stream,
                              std::span<const Vector> seeds) {
  de.validate();
  merit.validate();
  if (!c.allFinite()) throw DomainError("farthest_point: center must be finite");
  const ParameterBox& box = region.spec().box;
  const std::size_t k = box.dimension();
  if (static_cast<std::size_t>(c.size()) != qoi.output_dimension(k)) {
    throw DomainError("farthest_point: center has the wrong dimension");
  }

  FarthestResult result;
  Incumbent best;
  std::size_t evaluations = 0;

  auto probe = [&](const Vector& theta, double& violation) {
    ++evaluations;
    violation = region.violation(theta, merit.tolerance);
    Vector phi = qoi(theta);
    const double d2 = (phi - c).squaredNorm();
    if (violation == 0.0 && std::isfinite(d2)) best.offer(theta, std::move(phi), d2);
    return d2;
  };

  std::vector<Vector> starts;
  starts.push_back(region.mle_theta());
  for (const Vector& s : seeds) starts.push_back(box.clamp(s));
  for (const Vector& s : starts) {
    double violation = 0.0;
    probe(s, violation);
  }

  if (!best.found()) {
    // Locate a feasible seed by minimizing the violation alone.
    RandomStream sub = stream.split("feasibility");
    const Objective objective = [&](const Vector& theta) {
      double violation = 0.0;
      probe(theta, violation);
      return violation;
    };
    const DEResult seed = minimize_de(objective, box, de, sub, starts);
    ++result.rounds;
    if (!best.found()) {
      char alpha[32];
      std::snprintf(alpha, sizeof alpha, "%.6g", region.alpha());
      throw InfeasibleError(std::string("no feasible parameter found in the likelihood region (alpha ") + alpha + ")");
    }
    starts.push_back(seed.best);
  }

  Vector round_best = best.theta;
  std::size_t round = 0;
  for (double mu = merit.initial_mu; mu <= merit.mu_cap * (1.0 + 1e-12); mu *= merit.growth, ++round) {
    const double before = best.squared;
    RandomStream sub = stream.split("merit-" + std::to_string(round));
    const Objective objective = [&](const Vector& theta) {
      double violation = 0.0;
      const double d2 = probe(theta, violation);
      if (violation == kInf || !std::isfinite(d2)) return kInf;
      return -d2 + mu * violation;
    };
    std::vector<Vector> round_seeds{best.theta, round_best};
    for (const Vector& s : starts) round_seeds.push_back(s);
    const DEResult r = minimize_de(objective, box, de, sub, round_seeds);
    ++result.rounds;
    round_best = r.best;
    const bool round_feasible = region.violation(r.best, merit.tolerance) == 0.0;
    if (round_feasible && best.squared - before <= kUnchanged * (1.0 + std::abs(before))) break;
  }

  // Extreme-barrier polish of the incumbent.
  const Objective barrier = [&](const Vector& theta) {
    double violation = 0.0;
    const double d2 = probe(theta, violation);
    return violation == 0.0 ? -d2 : kInf;
  };
  polish_compass(barrier, box, best.theta, kPolishStart, kPolishEnd, 400 * k + 400);

  result.theta = best.theta;
  result.phi = best.phi;
  result.distance = std::sqrt(best.squared);
  result.evaluations = evaluations;
  return result;
}

}  // namespace fourthkind
