#pragma once

#include <memory>

#include "fourthkind/model.hpp"

namespace fourthkind {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Relative feasibility tolerance applied to the region constraint.
inline constexpr double kDefaultFeasibilityTolerance = 1e-9;

/// The likelihood region {theta in box : relative likelihood >= alpha}.
///
/// Membership is closed (equality counts as inside). Gaussian kinds compare
/// the residual sum to the threshold M_alpha; coins compare log relative
/// likelihoods. Both routes agree because log pbar = -(S - S_ref) / 2 sigma^2.
class LikelihoodRegion {
 public:
  LikelihoodRegion(std::shared_ptr<const ObservedModel> observed, double alpha,
                   LikelihoodMode mode = LikelihoodMode::exact);

  const ObservedModel& observed() const { return *observed_; }
  std::shared_ptr<const ObservedModel> observed_ptr() const { return observed_; }
  const ModelSpec& spec() const { return observed_->spec(); }
  double alpha() const { return alpha_; }
  double log_alpha() const { return log_alpha_; }
  LikelihoodMode mode() const { return mode_; }

  /// Same model and data at a different rarity level.
  LikelihoodRegion with_alpha(double alpha) const;

  bool contains(const Vector& theta) const;
  /// Membership through the log relative likelihood (independent of M_alpha).
  bool contains_by_likelihood(const Vector& theta) const;

  /// M_alpha = S_ref + 2 sigma^2 ln(1/alpha); +inf when alpha = 0.
  double gaussian_threshold() const;

  /// Constraint value in natural units, <= 0 inside: S(theta) - M_alpha for
  /// Gaussian kinds, log(alpha) - log pbar(theta) for coins.
  double constraint(const Vector& theta) const;
  /// Positive part of the constraint after the relative tolerance.
  double violation(const Vector& theta, double tolerance = kDefaultFeasibilityTolerance) const;
  bool feasible(const Vector& theta, double tolerance = kDefaultFeasibilityTolerance) const {
    return violation(theta, tolerance) == 0.0;
  }

  /// The MLE of the cached fit; a member whenever the region is nonempty.
  const Vector& mle_theta() const { return observed_->require_mle().theta; }

 private:
  std::shared_ptr<const ObservedModel> observed_;
  double alpha_;
  double log_alpha_;
  LikelihoodMode mode_;
  double threshold_ = 0.0;
};

/// Free-function form of the membership test.
bool contains(const LikelihoodRegion& region, const Vector& theta);
double gaussian_threshold(const LikelihoodRegion& region);

/// Closed interval of a 1-D region: closed form for gaussian-mean, bisection
/// outward from the MLE (to 1e-10) otherwise.
Interval interval_region_1d(const LikelihoodRegion& region);

/// Largest alpha for which the region is nonempty: 1 in exact mode,
/// exp(-(S_min - S_mean) / 2 sigma^2) for Gaussian surrogate regions.
double max_nonempty_alpha(const ObservedModel& observed, LikelihoodMode mode);

}  // namespace fourthkind
