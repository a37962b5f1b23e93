#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "fourthkind/error.hpp"
#include "fourthkind/model.hpp"

using namespace fourthkind;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

ModelSpec gaussian_mean(double tau = 3.0, double sigma = 1.0) {
  ModelSpec spec;
  spec.kind = ModelKind::gaussian_mean;
  spec.box = ParameterBox(vec({-tau}), vec({tau}));
  spec.sigma = sigma;
  return spec;
}

ModelSpec coin(std::size_t tosses) {
  ModelSpec spec;
  spec.kind = ModelKind::bernoulli_coins;
  spec.box = ParameterBox(vec({0.0}), vec({1.0}));
  spec.tosses = {tosses};
  return spec;
}

Dataset coin_data(std::size_t h, std::size_t t) {
  const std::size_t heads[] = {h};
  const std::size_t tails[] = {t};
  return coin_dataset(heads, tails);
}

ModelSpec quadratic() {
  ModelSpec spec;
  spec.kind = ModelKind::gaussian_noise;
  spec.box = ParameterBox(vec({-30, -30, -30}), vec({30, 30, 30}));
  spec.sigma = std::sqrt(10.0);
  spec.measurement = MeasurementFunction(QuadraticMeasurement{});
  return spec;
}

ModelSpec lotka_volterra(LotkaVolterraMeasurement lv = {}) {
  ModelSpec spec;
  spec.kind = ModelKind::gaussian_noise;
  spec.box = ParameterBox(vec({-5, -5}), vec({5, 5}));
  spec.sigma = 5.0;
  spec.measurement = MeasurementFunction(lv);
  return spec;
}

// Ordinary least squares on the Vandermonde system.
Vector vandermonde_fit(const Dataset& data) {
  const auto grid = MeasurementFunction(QuadraticMeasurement{}).time_grid();
  Matrix v(static_cast<Eigen::Index>(grid.size()), 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v(r, 0) = 1.0;
    v(r, 1) = grid[i];
    v(r, 2) = grid[i] * grid[i];
  }
  return v.colPivHouseholderQr().solve(data.samples.front());
}

}  // namespace

TEST_CASE("log_likelihood examples") {
  const ModelSpec gm = gaussian_mean();
  CHECK(log_likelihood(gm, Dataset{{vec({0.7})}, {}}, vec({0.7})) ==
        doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));

  CHECK(log_likelihood(coin(5), coin_data(4, 1), vec({0.8})) ==
        doctest::Approx(4.0 * std::log(0.8) + std::log(0.2)).epsilon(1e-14));

  const ModelSpec q = quadratic();
  const Vector truth = vec({1.0, 0.5, 1.0});
  const Dataset noiseless{{q.measurement.evaluate(truth)}, q.measurement.time_grid()};
  CHECK(log_likelihood(q, noiseless, truth) ==
        doctest::Approx(-(100.0 / 2.0) * std::log(2.0 * std::numbers::pi * 10.0)).epsilon(1e-12));
}

TEST_CASE("log_likelihood rejects parameters outside the box") {
  CHECK_THROWS_AS(log_likelihood(gaussian_mean(), Dataset{{vec({0.0})}, {}}, vec({3.5})), DomainError);
}

TEST_CASE("relative_log_likelihood examples") {
  const ModelSpec gm = gaussian_mean();
  const Dataset x{{vec({1.5})}, {}};
  CHECK(relative_log_likelihood(gm, x, vec({0.5}), LikelihoodMode::surrogate) == doctest::Approx(-0.5));

  const ObservedModel c(coin(5), coin_data(4, 1));
  CHECK(c.relative_log_likelihood(vec({0.5}), LikelihoodMode::exact) ==
        doctest::Approx(std::log(0.03125 / 0.08192)).epsilon(1e-13));

  RandomStream stream(1);
  const ObservedModel fitted = ObservedModel::fitted(gm, x, stream);
  CHECK(fitted.relative_log_likelihood(fitted.require_mle().theta, LikelihoodMode::exact) == 0.0);
  const ObservedModel fitted_coin = ObservedModel::fitted(coin(5), coin_data(4, 1), stream);
  CHECK(fitted_coin.relative_log_likelihood(fitted_coin.require_mle().theta, LikelihoodMode::exact) == 0.0);
}

TEST_CASE("exact relative likelihood needs a cached MLE") {
  const ObservedModel unfitted(gaussian_mean(), Dataset{{vec({1.5})}, {}});
  CHECK_THROWS_AS(unfitted.relative_log_likelihood(vec({0.0}), LikelihoodMode::exact), StateError);
  CHECK_THROWS_AS(relative_log_likelihood(gaussian_mean(), Dataset{{vec({1.5})}, {}}, vec({0.0}),
                                          LikelihoodMode::exact),
                  StateError);
}

TEST_CASE("coin model boundary uses 0^0 = 1") {
  const ObservedModel all_heads(coin(3), coin_data(3, 0));
  CHECK(all_heads.relative_log_likelihood(vec({1.0}), LikelihoodMode::exact) == 0.0);
  CHECK(all_heads.relative_log_likelihood(vec({0.0}), LikelihoodMode::exact) == -INFINITY);
  CHECK(std::isfinite(all_heads.log_likelihood(vec({1.0}))));
}

TEST_CASE("sample_data examples") {
  ModelSpec q = quadratic();
  q.sigma = 1e-12;
  RandomStream stream(3);
  const Vector theta = vec({1.0, -2.0, 0.3});
  const Dataset d = sample_data(q, theta, 1, stream);
  CHECK((d.samples.front() - q.measurement.evaluate(theta)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(d.times.size() == 100);

  const Dataset heads = sample_data(coin(20), vec({1.0}), 3, stream);
  CHECK(heads.sample_count() == 60);
  for (const Vector& row : heads.samples) CHECK(row[1] == 1.0);

  const Dataset g = sample_data(gaussian_mean(), vec({0.0}), 10000, stream);
  double mean = 0.0;
  for (const Vector& x : g.samples) mean += x[0];
  mean /= 10000.0;
  double var = 0.0;
  for (const Vector& x : g.samples) var += (x[0] - mean) * (x[0] - mean);
  var /= 9999.0;
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample_data is reproducible") {
  RandomStream a(17);
  RandomStream b(17);
  const ModelSpec lv = lotka_volterra();
  const Dataset da = sample_data(lv, vec({0.55, 0.8}), 2, a);
  const Dataset db = sample_data(lv, vec({0.55, 0.8}), 2, b);
  for (std::size_t i = 0; i < da.samples.size(); ++i) CHECK(da.samples[i] == db.samples[i]);
}

TEST_CASE("find_mle closed forms") {
  RandomStream stream(1);
  CHECK(find_mle(coin(5), coin_data(4, 1), stream).theta[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(find_mle(gaussian_mean(), Dataset{{vec({1.5})}, {}}, stream).theta[0] == 1.5);
  CHECK(find_mle(gaussian_mean(), Dataset{{vec({5.0})}, {}}, stream).theta[0] == 3.0);
  const Dataset several{{vec({1.0}), vec({2.0}), vec({-4.5})}, {}};
  CHECK(find_mle(gaussian_mean(), several, stream).theta[0] == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("find_mle on the quadratic model matches least squares") {
  const ModelSpec q = quadratic();
  RandomStream stream(8);
  const Vector truth = vec({1.0, 0.5, 1.0});
  const Dataset noiseless{{q.measurement.evaluate(truth)}, q.measurement.time_grid()};
  const MleResult clean = find_mle(q, noiseless, stream);
  CHECK((clean.theta - truth).cwiseAbs().maxCoeff() < 1e-3);
  CHECK_FALSE(clean.warning);

  RandomStream noise(21);
  const Dataset noisy = sample_data(q, truth, 1, noise);
  const MleResult fit = find_mle(q, noisy, stream);
  CHECK((fit.theta - vandermonde_fit(noisy)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("measurement evaluation examples") {
  LotkaVolterraMeasurement lv;
  lv.eta = 0.0;
  const Vector constant_prey = MeasurementFunction(lv).evaluate(vec({0.0, 0.8}));
  for (Eigen::Index i = 0; i < constant_prey.size(); i += 2) CHECK(constant_prey[i] == doctest::Approx(30.0).epsilon(1e-14));

  CHECK(MeasurementFunction(QuadraticMeasurement{}).evaluate(vec({0, 0, 0})).isZero(0.0));

  // Self-convergence: 200 steps vs 2000 steps at t = 20.
  LotkaVolterraMeasurement coarse;
  LotkaVolterraMeasurement fine;
  fine.steps = 2000;
  const Vector theta = vec({0.55, 0.8});
  const Vector a = MeasurementFunction(coarse).evaluate(theta);
  const Vector b = MeasurementFunction(fine).evaluate(theta);
  CHECK(a.size() == 400);
  CHECK(b.size() == 4000);
  for (int c = 0; c < 2; ++c) {
    const double x200 = a[a.size() - 2 + c];
    const double x2000 = b[b.size() - 2 + c];
    CHECK(std::abs(x200 - x2000) <= 1e-4 * std::abs(x2000));
  }
}

TEST_CASE("measurement grids and ids") {
  const MeasurementFunction q(QuadraticMeasurement{});
  const auto grid = q.time_grid();
  REQUIRE(grid.size() == 100);
  CHECK(grid.front() > 0.0);
  CHECK(grid.back() < 5.0);
  CHECK(q.id() == "quadratic");
  const MeasurementFunction lv(LotkaVolterraMeasurement{});
  CHECK(lv.time_grid().back() == doctest::Approx(20.0));
  CHECK(lv.time_grid().front() == doctest::Approx(0.1));
  CHECK(lv.output_dimension(2) == 400);

  const MeasurementFunction built = MeasurementFunction::from_id("lotka-volterra", {{"eta", 0.03}, {"x0", 25.0}});
  CHECK(built.constants().at("eta") == 0.03);
  CHECK(built.constants().at("x0") == 25.0);
  CHECK_THROWS_AS(MeasurementFunction::from_id("lotka-volterra", {{"bogus", 1.0}}), DomainError);
  CHECK_THROWS_AS(MeasurementFunction::from_id("spline", {}), DomainError);
}

TEST_CASE("diverging Lotka-Volterra solutions become -inf log-likelihood") {
  const ModelSpec lv = lotka_volterra();
  const Vector theta = vec({5.0, -5.0});
  const Vector m = lv.measurement.evaluate(theta);
  CHECK_FALSE(m.allFinite());
  RandomStream stream(4);
  const Dataset data = sample_data(lv, vec({0.55, 0.8}), 1, stream);
  CHECK(log_likelihood(lv, data, theta) == -INFINITY);
}

TEST_CASE("Lotka-Volterra evaluation is bit-identical across calls") {
  const MeasurementFunction lv(LotkaVolterraMeasurement{});
  const Vector theta = vec({0.55, 0.8});
  CHECK(lv.evaluate(theta) == lv.evaluate(theta));
}

TEST_CASE("exact relative likelihood is nonpositive and dominates the surrogate") {
  RandomStream stream(99);
  const ModelSpec q = quadratic();
  const ModelSpec lv = lotka_volterra();
  RandomStream data_stream(5);
  for (const ModelSpec* spec : {&q, &lv}) {
    const Vector truth = spec == &q ? vec({1.0, 0.5, 1.0}) : vec({0.55, 0.8});
    const ObservedModel observed = ObservedModel::fitted(*spec, sample_data(*spec, truth, 1, data_stream), stream);
    const std::vector<Vector> points = latin_hypercube(spec->box, 200, stream);
    for (const Vector& theta : points) {
      const double exact = observed.relative_log_likelihood(theta, LikelihoodMode::exact);
      const double surrogate = observed.relative_log_likelihood(theta, LikelihoodMode::surrogate);
      CHECK(exact <= 0.0);
      CHECK(surrogate <= exact);
    }
  }
}

TEST_CASE("gaussian-mean MLE is the clamped sample mean") {
  RandomStream stream(6);
  const ModelSpec gm = gaussian_mean();
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset d = sample_data(gm, vec({-3.0 + 6.0 * stream.uniform()}), 1 + stream.below(4), stream);
    Dataset shifted = d;
    for (Vector& x : shifted.samples) x[0] += 4.0 * (stream.uniform() - 0.5);
    double mean = 0.0;
    for (const Vector& x : shifted.samples) mean += x[0];
    mean /= static_cast<double>(shifted.sample_count());
    CHECK(find_mle(gm, shifted, stream).theta[0] == std::clamp(mean, -3.0, 3.0));
  }
}

TEST_CASE("model validation") {
  ModelSpec bad = gaussian_mean();
  bad.sigma = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(ParameterBox(vec({1.0}), vec({0.0})), DomainError);
  CHECK_THROWS_AS(ObservedModel(gaussian_mean(), Dataset{{vec({1.0, 2.0})}, {}}), DomainError);
  CHECK_THROWS_AS(Dataset{}.validate(), DomainError);
  ModelSpec c = coin(5);
  c.tosses = {5, 5};
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK_THROWS_AS(parse_model_kind("poisson"), DomainError);
  CHECK(parse_model_kind("gaussian-noise") == ModelKind::gaussian_noise);
  CHECK(parse_likelihood_mode("surrogate") == LikelihoodMode::surrogate);
}
