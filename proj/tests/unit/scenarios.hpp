#pragma once

// Small model fixtures shared by the unit tests.

#include <cmath>
#include <memory>

#include "fourthkind/model.hpp"
#include "fourthkind/region.hpp"

namespace fixtures {

using fourthkind::Vector;

inline Vector scalar(double x) { return Vector::Constant(1, x); }

inline Vector v2(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

inline fourthkind::ModelSpec gaussian_mean_spec(double tau = 3.0) {
  fourthkind::ModelSpec spec;
  spec.kind = fourthkind::ModelKind::gaussian_mean;
  spec.box = fourthkind::ParameterBox(scalar(-tau), scalar(tau));
  spec.sigma = 1.0;
  return spec;
}

inline std::shared_ptr<const fourthkind::ObservedModel> gaussian_mean(double x = 1.5, double tau = 3.0) {
  fourthkind::RandomStream stream(1);
  return std::make_shared<const fourthkind::ObservedModel>(
      fourthkind::ObservedModel::fitted(gaussian_mean_spec(tau), fourthkind::Dataset{{scalar(x)}, {}}, stream));
}

inline fourthkind::ModelSpec two_coin_spec() {
  fourthkind::ModelSpec spec;
  spec.kind = fourthkind::ModelKind::bernoulli_coins;
  spec.box = fourthkind::ParameterBox(v2(0, 0), v2(1, 1));
  spec.tosses = {4, 6};
  return spec;
}

inline std::shared_ptr<const fourthkind::ObservedModel> two_coins() {
  const std::size_t heads[] = {1, 5};
  const std::size_t tails[] = {3, 1};
  fourthkind::RandomStream stream(1);
  return std::make_shared<const fourthkind::ObservedModel>(
      fourthkind::ObservedModel::fitted(two_coin_spec(), fourthkind::coin_dataset(heads, tails), stream));
}

/// Independent evaluation of the two-coin log relative likelihood with data
/// h = (1, 5), t = (3, 1).
inline double two_coin_log_relative(double p1, double p2) {
  auto term = [](double h, double t, double p) {
    const double n = h + t;
    const double at = (h > 0 ? h * std::log(p) : 0.0) + (t > 0 ? t * std::log1p(-p) : 0.0);
    const double top = (h > 0 ? h * std::log(h / n) : 0.0) + (t > 0 ? t * std::log(t / n) : 0.0);
    return at - top;
  };
  return term(1, 3, p1) + term(5, 1, p2);
}

}  // namespace fixtures
