#include "fourthkind/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBisectionTolerance = 1e-12;

}  // namespace

LikelihoodRegion::LikelihoodRegion(std::shared_ptr<const ObservedModel> observed, double alpha,
                                   LikelihoodMode mode)
    : observed_(std::move(observed)), alpha_(alpha), mode_(mode) {
  if (!observed_) throw DomainError("likelihood region needs an observed model");
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) throw DomainError("rarity level alpha must be >= 0");
  // Both modes inject the MLE into searches, so the fit must exist.
  observed_->require_mle();
  log_alpha_ = alpha_ == 0.0 ? -kInf : std::log(alpha_);
  if (observed_->is_gaussian()) {
    const double sigma = observed_->spec().sigma;
    threshold_ = alpha_ == 0.0 ? kInf
                               : observed_->reference_residual(mode_) - 2.0 * sigma * sigma * log_alpha_;
  }
}

LikelihoodRegion LikelihoodRegion::with_alpha(double alpha) const {
  return LikelihoodRegion(observed_, alpha, mode_);
}

double LikelihoodRegion::gaussian_threshold() const {
  if (!observed_->is_gaussian()) throw DomainError("M_alpha is defined for Gaussian models only");
  return threshold_;
}

bool LikelihoodRegion::contains(const Vector& theta) const {
  if (!spec().box.contains(theta)) return false;
  if (alpha_ == 0.0) return true;
  if (alpha_ > 1.0) return false;
  if (observed_->is_gaussian()) return observed_->residual_sum(theta) <= threshold_;
  return observed_->relative_log_likelihood(theta, mode_) >= log_alpha_;
}

bool LikelihoodRegion::contains_by_likelihood(const Vector& theta) const {
  if (!spec().box.contains(theta)) return false;
  if (alpha_ == 0.0) return true;
  if (alpha_ > 1.0) return false;
  return observed_->relative_log_likelihood(theta, mode_) >= log_alpha_;
}

double LikelihoodRegion::constraint(const Vector& theta) const {
  if (alpha_ == 0.0) return -kInf;
  if (observed_->is_gaussian()) return observed_->residual_sum(theta) - threshold_;
  const double log_rel = observed_->relative_log_likelihood(theta, mode_);
  if (log_rel == -kInf) return kInf;
  return log_alpha_ - log_rel;
}

double LikelihoodRegion::violation(const Vector& theta, double tolerance) const {
  if (alpha_ == 0.0) return 0.0;
  const double value = constraint(theta);
  if (std::isnan(value)) return kInf;
  // Tolerance relative to the gap between the region boundary and the MLE.
  double scale = alpha_ < 1.0 ? -log_alpha_ : 0.0;
  if (observed_->is_gaussian()) scale *= 2.0 * spec().sigma * spec().sigma;
  const double excess = value - tolerance * scale;
  return excess > 0.0 ? excess : 0.0;
}

bool contains(const LikelihoodRegion& region, const Vector& theta) { return region.contains(theta); }

double gaussian_threshold(const LikelihoodRegion& region) { return region.gaussian_threshold(); }

Interval interval_region_1d(const LikelihoodRegion& region) {
  const ModelSpec& spec = region.spec();
  if (spec.parameter_dimension() != 1) throw DomainError("interval_region_1d needs a 1-D parameter");
  const double lo = spec.box.lower()[0];
  const double hi = spec.box.upper()[0];
  if (region.alpha() == 0.0) return {lo, hi};

  const ObservedModel& observed = region.observed();
  if (spec.kind == ModelKind::gaussian_mean) {
    // N (theta - xbar)^2 <= S_ref - S_mean + 2 sigma^2 ln(1/alpha)
    const double n = static_cast<double>(observed.data().sample_count());
    double xbar = 0.0;
    for (const Vector& x : observed.data().samples) xbar += x[0];
    xbar /= n;
    const double budget = region.gaussian_threshold() - observed.mean_residual_sum();
    if (budget < 0.0) throw InfeasibleError("likelihood region is empty");
    const double half = std::sqrt(budget / n);
    const Interval interval{std::max(lo, xbar - half), std::min(hi, xbar + half)};
    if (interval.lower > interval.upper) throw InfeasibleError("likelihood region is empty");
    return interval;
  }

  const double center = region.mle_theta()[0];
  Vector probe(1);
  auto inside = [&](double t) {
    probe[0] = t;
    return region.contains(probe);
  };
  if (!inside(center)) throw InfeasibleError("likelihood region excludes the MLE");
  auto edge = [&](double limit) {
    if (inside(limit)) return limit;
    double in = center;
    double out = limit;
    while (std::abs(out - in) > kBisectionTolerance) {
      const double mid = 0.5 * (in + out);
      if (mid == in || mid == out) break;
      (inside(mid) ? in : out) = mid;
    }
    return in;
  };
  return {edge(lo), edge(hi)};
}

double max_nonempty_alpha(const ObservedModel& observed, LikelihoodMode mode) {
  if (mode == LikelihoodMode::exact || !observed.is_gaussian()) return 1.0;
  const double sigma = observed.spec().sigma;
  const double gap = observed.require_mle().residual_sum - observed.mean_residual_sum();
  return std::min(1.0, std::exp(-std::max(0.0, gap) / (2.0 * sigma * sigma)));
}

}  // namespace fourthkind
