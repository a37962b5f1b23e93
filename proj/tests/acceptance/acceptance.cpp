// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fourthkind/cases.hpp"
#include "fourthkind/game.hpp"
#include "fourthkind/io.hpp"
#include "fourthkind/miniball.hpp"
#include "fourthkind/significance.hpp"
#include "oracles.hpp"

using namespace fourthkind;

namespace {

constexpr double kEpsilon = 0.01;

struct Outcome {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

class Checker {
 public:
  void expect(bool condition, const std::string& what) {
    if (!condition && failures_.size() < 6) failures_.push_back(what);
    if (!condition) ++failed_;
    ++total_;
  }
  Outcome outcome(std::string summary) const {
    Outcome o;
    o.pass = failed_ == 0;
    std::ostringstream out;
    out << summary << " [" << (total_ - failed_) << "/" << total_ << " checks]";
    for (const std::string& f : failures_) out << "; " << f;
    o.detail = out.str();
    return o;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t failed_ = 0;
  std::size_t total_ = 0;
};

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

// Every game solution produced here, for the iteration-bound criterion.
struct Recorded {
  std::string label;
  GameSolution solution;
  std::size_t decision_dimension = 0;
};
std::vector<Recorded> g_solutions;

GameSolution record(const std::string& label, GameSolution solution, std::size_t n) {
  g_solutions.push_back({label, solution, n});
  return solution;
}

GameSolution solve_gaussian_mean(double alpha, std::uint64_t seed) {
  Scenario s = builtin_scenario("gaussian-mean");
  s.alpha = alpha;
  RandomStream stream(seed);
  const auto observed = observe(s, stream);
  return record("gaussian-mean alpha=" + fmt(alpha), solve_scenario(s, observed, stream), 1);
}

Outcome criterion_gaussian_mean() {
  Checker check;
  const double x = 1.5;
  const double tau = 3.0;
  for (const double alpha : {std::exp(-0.5), std::exp(-2.0), 0.9}) {
    const double half = std::sqrt(2.0 * std::log(1.0 / alpha));
    const double lo = std::max(-tau, x - half);
    const double hi = std::min(tau, x + half);
    const double mid = 0.5 * (lo + hi);
    const double risk = 0.25 * (hi - lo) * (hi - lo);
    const GameSolution s = solve_gaussian_mean(alpha, 1);
    check.expect(std::abs(s.decision[0] - mid) <= 2 * kEpsilon * std::max(std::abs(mid), 1e-300) ||
                     std::abs(s.decision[0] - mid) <= 2 * kEpsilon * std::sqrt(risk),
                 "alpha=" + fmt(alpha) + " decision " + fmt(s.decision[0]) + " vs " + fmt(mid));
    check.expect(std::abs(s.risk - risk) <= 2 * kEpsilon * risk,
                 "alpha=" + fmt(alpha) + " risk " + fmt(s.risk) + " vs " + fmt(risk));
  }
  const GameSolution mle = solve_gaussian_mean(1.0, 1);
  check.expect(mle.decision[0] == 1.5 && mle.risk == 0.0, "alpha=1 gives (" + fmt(mle.decision[0]) + ", " + fmt(mle.risk) + ")");
  const GameSolution wide = solve_gaussian_mean(1e-12, 1);
  check.expect(std::abs(wide.decision[0]) <= 2 * kEpsilon * tau, "alpha=1e-12 decision " + fmt(wide.decision[0]));
  check.expect(std::abs(wide.risk - 9.0) <= 2 * kEpsilon * 9.0, "alpha=1e-12 risk " + fmt(wide.risk));
  Outcome o = check.outcome("gaussian-mean closed form at 5 alphas");
  o.budget = 10;
  return o;
}

Outcome criterion_chi2_identity() {
  Checker check;
  double worst = 0.0;
  double worst_inverse = 0.0;
  std::vector<double> alphas;
  for (int i = 0; i < 50; ++i) alphas.push_back(std::pow(10.0, -6.0 + 6.0 * i / 49.0));
  for (const double alpha : alphas) {
    worst = std::max(worst, std::abs(beta_asymptotic(2, alpha) - alpha));
    if (alpha < 1.0) worst_inverse = std::max(worst_inverse, std::abs(alpha_for_beta_asymptotic(2, alpha) - alpha));
  }
  check.expect(worst <= 1e-12, "max |beta - alpha| = " + fmt(worst));
  check.expect(worst_inverse <= 1e-9, "max inversion error = " + fmt(worst_inverse));
  // Grid inversion on the same alphas returns the target itself.
  const BetaCurve curve = beta_curve_asymptotic(2, alphas);
  for (std::size_t i = 0; i + 1 < alphas.size(); i += 7) {
    BetaCurve shifted = curve;
    const double picked = alpha_for_beta(shifted, alphas[i] * (1 + 1e-12));
    check.expect(std::abs(picked - alphas[i]) <= 1e-9 * alphas[i], "curve inversion at " + fmt(alphas[i]));
  }
  Outcome o = check.outcome("max |beta-alpha| " + fmt(worst) + ", inversion " + fmt(worst_inverse));
  o.budget = 1;
  return o;
}

Outcome criterion_surrogate_dominance() {
  Checker check;
  const Scenario s = builtin_scenario("quadratic");
  RandomStream stream(3);
  const auto observed = observe(s, stream);
  MonteCarloConfig config;
  RandomStream grid_stream = stream.split("grid");
  config.theta_grid = theta_grid_from_spec("lhs:5", s.spec.box, observed->require_mle().theta, grid_stream);
  config.trials = 200;
  config.samples = 1;
  config.mode = LikelihoodMode::exact;
  const std::vector<double> alphas{0.1, 0.5, 0.9};
  RandomStream mc = stream.split("mc");
  const BetaCurve curve = beta_curve_monte_carlo(s.spec, alphas, config, mc);
  std::string summary;
  for (const BetaPoint& p : curve.points) {
    const double bound = beta_gaussian_surrogate(100, 1, p.alpha);
    check.expect(p.beta <= bound + 3 * p.standard_error,
                 "alpha=" + fmt(p.alpha) + " mc " + fmt(p.beta) + " > surrogate " + fmt(bound));
    summary += "a=" + fmt(p.alpha) + ": " + fmt(p.beta) + "<=" + fmt(bound) + " ";
  }
  Outcome o = check.outcome(summary + "(200 trials, " + std::to_string(config.theta_grid.size()) + " thetas)");
  o.budget = 300;
  return o;
}

Outcome criterion_miniball() {
  Checker check;
  RandomStream stream(404);
  double worst_radius = 0.0;
  double worst_center = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index dim = trial % 2 == 0 ? 2 : 3;
    const std::size_t count = 1 + stream.below(8);
    std::vector<Vector> pts;
    for (std::size_t i = 0; i < count; ++i) {
      Vector p = Vector::NullaryExpr(dim, [&] { return stream.standard_normal(); });
      if (trial % 5 == 0) p.normalize();
      pts.push_back(p);
    }
    const MiniballResult mb = miniball_exact(pts);
    const oracle::Ball ref = oracle::brute_force_miniball(pts);
    worst_radius = std::max(worst_radius, std::abs(mb.ball.radius - ref.radius));
    worst_center = std::max(worst_center, (mb.ball.center - ref.center).norm());
  }
  check.expect(worst_radius <= 1e-8, "radius error " + fmt(worst_radius));
  check.expect(worst_center <= 1e-7, "center error " + fmt(worst_center));
  Outcome o = check.outcome("500 sets, max radius error " + fmt(worst_radius) + ", center error " + fmt(worst_center));
  o.budget = 30;
  return o;
}

Outcome criterion_iteration_bounds() {
  Checker check;
  std::size_t max_iterations = 0;
  for (const Recorded& r : g_solutions) {
    const GameSolution& s = r.solution;
    const double cap = 16.0 / (s.epsilon * s.epsilon) * (1.0 + 2.0 * s.delta);
    const double set_cap = std::min(2.0 + cap, static_cast<double>(r.decision_dimension) + 2.0);
    check.expect(static_cast<double>(s.iterations) <= cap, r.label + " iterations " + std::to_string(s.iterations));
    check.expect(static_cast<double>(s.max_working_set) <= set_cap,
                 r.label + " working set " + std::to_string(s.max_working_set));
    for (const TraceEntry& t : s.trace) {
      check.expect(static_cast<double>(t.working_set) <= set_cap, r.label + " trace working set");
    }
    max_iterations = std::max(max_iterations, s.iterations);
  }
  check.expect(!g_solutions.empty(), "no solves recorded");
  Outcome o = check.outcome(std::to_string(g_solutions.size()) + " solves, max iterations " + std::to_string(max_iterations));
  return o;
}

Outcome criterion_duality() {
  Checker check;
  std::string summary;
  for (const std::string& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    RandomStream stream(7);
    const auto observed = observe(s, stream);
    const GameSolution sol = record(name + " duality", solve_scenario(s, observed, stream), s.spec.decision_dimension());
    const LikelihoodRegion region(observed, sol.alpha, s.mode);
    Vector mean = Vector::Zero(sol.decision.size());
    for (const Atom& a : sol.measure.atoms) mean += a.weight * s.spec.qoi(a.theta);
    const double miss = (mean - sol.decision).cwiseAbs().maxCoeff();
    check.expect(miss <= 1e-9, name + " decision - E[phi] = " + fmt(miss));
    for (const Atom& a : sol.measure.atoms) check.expect(region.feasible(a.theta, 1e-9), name + " infeasible atom");
    const Certificate cert = certificate(sol);
    check.expect(cert.lower <= cert.upper, name + " lower > upper");
    check.expect(cert.gap >= -1e-9 && cert.gap <= 3 * kEpsilon * sol.risk + 1e-12,
                 name + " gap " + fmt(cert.gap) + " vs risk " + fmt(sol.risk));
    summary += name + ":" + std::to_string(sol.measure.size()) + " ";
  }
  Outcome o = check.outcome("atoms " + summary);
  o.budget = 600;
  return o;
}

std::string lotka_volterra_json(std::uint64_t seed, Checker* check) {
  const Scenario s = builtin_scenario("lotka-volterra");
  RandomStream stream(seed);
  const auto observed = observe(s, stream);
  const GameSolution sol = record("lotka-volterra", solve_scenario(s, observed, stream), 2);
  if (check) {
    check->expect(std::abs(sol.alpha - 0.05) <= 1e-9, "alpha " + fmt(sol.alpha));
    check->expect(sol.measure.size() == 2, std::to_string(sol.measure.size()) + " atoms");
    for (const Atom& a : sol.measure.atoms) check->expect(std::abs(a.weight - 0.5) <= 0.02, "weight " + fmt(a.weight));
    const double distance = (s.spec.qoi(s.truth) - sol.decision).norm();
    check->expect(distance <= sol.enlarged_radius,
                  "truth at distance " + fmt(distance) + " outside radius " + fmt(sol.enlarged_radius));
  }
  return solution_to_json(sol);
}

Outcome criterion_lotka_volterra() {
  Checker check;
  lotka_volterra_json(1, &check);
  const GameSolution& sol = g_solutions.back().solution;
  Outcome o = check.outcome("center (" + fmt(sol.decision[0]) + ", " + fmt(sol.decision[1]) + "), radius " +
                            fmt(sol.raw_radius) + ", " + std::to_string(sol.measure.size()) + " atoms");
  o.budget = 300;
  return o;
}

// Probability that fresh data for the two-coin model excludes theta from
// its own likelihood region, summing over every outcome.
double two_coin_enumeration(const std::vector<std::size_t>& tosses, const Vector& theta, double alpha) {
  auto xlogy = [](double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); };
  const int n1 = static_cast<int>(tosses[0]);
  const int n2 = static_cast<int>(tosses[1]);
  double excluded = 0.0;
  for (int h1 = 0; h1 <= n1; ++h1) {
    for (int h2 = 0; h2 <= n2; ++h2) {
      const int n[] = {n1, n2};
      const int h[] = {h1, h2};
      double log_rel = 0.0;
      double log_prob = 0.0;
      for (int c = 0; c < 2; ++c) {
        const double p = theta[c];
        const double hat = static_cast<double>(h[c]) / n[c];
        log_rel += xlogy(h[c], p) + xlogy(n[c] - h[c], 1 - p) - xlogy(h[c], hat) - xlogy(n[c] - h[c], 1 - hat);
        log_prob += std::lgamma(n[c] + 1.0) - std::lgamma(h[c] + 1.0) - std::lgamma(n[c] - h[c] + 1.0) +
                    xlogy(h[c], p) + xlogy(n[c] - h[c], 1 - p);
      }
      if (log_rel < std::log(alpha)) excluded += std::exp(log_prob);
    }
  }
  return excluded;
}

Outcome criterion_coin_enumeration() {
  Checker check;
  const Scenario s = builtin_scenario("coin-2");
  RandomStream stream(8);
  const auto observed = observe(s, stream);
  MonteCarloConfig config;
  config.theta_grid = {s.truth, observed->require_mle().theta};
  config.trials = 10000;
  std::string summary;
  for (const double alpha : {0.2, 0.5, 0.8}) {
    RandomStream mc = stream.split(static_cast<std::uint64_t>(alpha * 1000));
    const BetaEstimate est = beta_monte_carlo(s.spec, alpha, config, mc);
    double exact = 0.0;
    for (const Vector& theta : config.theta_grid) exact = std::max(exact, two_coin_enumeration(s.spec.tosses, theta, alpha));
    const double se = std::max(est.standard_error, std::sqrt(exact * (1 - exact) / config.trials));
    check.expect(std::abs(est.beta - exact) <= 3 * se,
                 "alpha=" + fmt(alpha) + " mc " + fmt(est.beta) + " vs exact " + fmt(exact));
    summary += "a=" + fmt(alpha) + ": " + fmt(est.beta) + " vs " + fmt(exact) + " ";
  }
  Outcome o = check.outcome(summary);
  o.budget = 60;
  return o;
}

Outcome criterion_risk_monotonicity() {
  Checker check;
  std::string summary;
  for (const std::string& name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    RandomStream stream(9);
    const auto observed = observe(s, stream);
    RandomStream beta_stream = stream.split("betas");
    const std::vector<double> betas = default_risk_betas(s, *observed, beta_stream);
    RandomStream sweep = stream.split("sweep");
    const std::vector<RiskRow> rows = risk_sweep(s, observed, betas, sweep);
    check.expect(rows.size() == 8, name + " has " + std::to_string(rows.size()) + " rows");
    bool complete = true;
    for (const RiskRow& row : rows) {
      if (!row.solution) {
        complete = false;
        check.expect(false, name + " beta=" + fmt(row.beta) + " failed: " + row.message);
        continue;
      }
      record(name + " sweep beta=" + fmt(row.beta), *row.solution, s.spec.decision_dimension());
    }
    if (!complete) continue;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      check.expect(rows[i].solution->risk <= rows[i - 1].solution->risk * (1 + 3 * kEpsilon) + 1e-12,
                   name + " risk rises at beta=" + fmt(rows[i].beta));
    }
    const double first = rows.front().solution->risk;
    const double last = rows.back().solution->risk;
    check.expect(last < 0.01 * first, name + " endpoint ratio " + fmt(last / first));
    summary += name + " " + fmt(first) + "->" + fmt(last) + " ";
  }
  Outcome o = check.outcome(summary);
  o.budget = 900;
  return o;
}

Outcome criterion_determinism() {
  Checker check;
  const std::string first = lotka_volterra_json(1, nullptr);
  const std::string second = lotka_volterra_json(1, nullptr);
  check.expect(first == second, "solution JSON differs between runs");
  check.expect(!first.empty(), "empty JSON");
  return check.outcome(std::to_string(first.size()) + " bytes identical");
}

Outcome timed(const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.budget > 0 && o.seconds > o.budget) {
    o.pass = false;
    o.detail += "; runtime over " + fmt(o.budget) + " s";
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> order{
      {1, criterion_gaussian_mean}, {2, criterion_chi2_identity},   {3, criterion_surrogate_dominance},
      {4, criterion_miniball},      {6, criterion_duality},         {7, criterion_lotka_volterra},
      {8, criterion_coin_enumeration}, {9, criterion_risk_monotonicity}, {10, criterion_determinism},
      // Runs last: it inspects every solve made above.
      {5, criterion_iteration_bounds},
  };
  std::map<int, Outcome> results;
  for (const auto& [id, body] : order) {
    std::fprintf(stderr, "running criterion %d...\n", id);
    results[id] = timed(body);
  }
  bool all = true;
  for (const auto& [id, o] : results) {
    std::printf("criterion %2d: %s  (%.2f s) %s\n", id, o.pass ? "PASS" : "FAIL", o.seconds, o.detail.c_str());
    all = all && o.pass;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
