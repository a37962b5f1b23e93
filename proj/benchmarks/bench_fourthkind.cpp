#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

#include "fourthkind/cases.hpp"
#include "fourthkind/game.hpp"
#include "fourthkind/miniball.hpp"
#include "fourthkind/numerics.hpp"
#include "fourthkind/significance.hpp"

using namespace fourthkind;

namespace {

void BM_Miniball(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const auto dim = static_cast<Eigen::Index>(state.range(1));
  RandomStream stream(1);
  std::vector<Vector> points;
  for (std::size_t i = 0; i < count; ++i) points.push_back(Vector::NullaryExpr(dim, [&] { return stream.standard_normal(); }));
  for (auto _ : state) benchmark::DoNotOptimize(miniball_exact(points).ball.radius);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}
BENCHMARK(BM_Miniball)->Args({8, 2})->Args({100, 2})->Args({100, 3})->Args({1000, 3})->Args({1000, 8});

void BM_Chi2Cdf(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 3.0 * k) x = 0.0;
    benchmark::DoNotOptimize(chi2_cdf(k, x));
  }
}
BENCHMARK(BM_Chi2Cdf)->Arg(1)->Arg(2)->Arg(100);

void BM_Chi2Quantile(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chi2_quantile(k, 0.95));
}
BENCHMARK(BM_Chi2Quantile)->Arg(1)->Arg(100);

void BM_SolveScenario(benchmark::State& state, const char* name) {
  const Scenario s = builtin_scenario(name);
  RandomStream stream(1);
  const auto observed = observe(s, stream);
  for (auto _ : state) {
    RandomStream solve(2);
    benchmark::DoNotOptimize(solve_scenario(s, observed, solve).risk);
  }
}
BENCHMARK_CAPTURE(BM_SolveScenario, gaussian_mean, "gaussian-mean")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveScenario, coin_2, "coin-2")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveScenario, lotka_volterra, "lotka-volterra")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SolveScenario, quadratic, "quadratic")->Unit(benchmark::kMillisecond);

void BM_MonteCarloCoins(benchmark::State& state) {
  const Scenario s = builtin_scenario("coin-2");
  MonteCarloConfig config;
  config.theta_grid = {s.truth};
  config.trials = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    RandomStream stream(3);
    benchmark::DoNotOptimize(beta_monte_carlo(s.spec, 0.5, config, stream).beta);
  }
}
BENCHMARK(BM_MonteCarloCoins)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
