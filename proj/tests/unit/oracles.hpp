#pragma once

// Independent reference computations used as test oracles. None of these
// call into the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// Chi-square CDF by integrating the density after x = u^2 (removes the
/// singularity at 0 for k = 1).
inline double chi2_cdf(int k, double x) {
  if (x <= 0.0) return 0.0;
  const double half = 0.5 * k;
  const double log_norm = half * std::log(2.0) + std::lgamma(half);
  auto integrand = [&](double u) {
    if (u == 0.0) return k == 1 ? 2.0 * std::exp(-log_norm) : 0.0;
    return 2.0 * std::exp((k - 1) * std::log(u) - 0.5 * u * u - log_norm);
  };
  return integrate(integrand, 0.0, std::sqrt(x));
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  double flo = f(lo);
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double chi2_quantile(int k, double p) {
  double hi = 1.0;
  while (chi2_cdf(k, hi) < p) hi *= 2.0;
  return bisect([&](double x) { return chi2_cdf(k, x) - p; }, 0.0, hi, 100);
}

struct Ball {
  Eigen::VectorXd center;
  double radius = -1.0;
};

/// Smallest ball through `pts` with center in their affine hull, or radius < 0
/// when the points are affinely dependent.
inline Ball circumscribed(const std::vector<Eigen::VectorXd>& pts) {
  Ball b;
  if (pts.size() == 1) return {pts[0], 0.0};
  const auto m = static_cast<Eigen::Index>(pts.size() - 1);
  Eigen::MatrixXd q(pts[0].size(), m);
  for (Eigen::Index j = 0; j < m; ++j) q.col(j) = pts[static_cast<std::size_t>(j) + 1] - pts[0];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q);
  if (svd.singularValues().minCoeff() <= 1e-10 * std::max(1.0, svd.singularValues().maxCoeff())) return b;
  // |c - p0|^2 = |c - pj|^2 with c = p0 + q y  <=>  (q^T q) y = diag(q^T q) / 2
  const Eigen::MatrixXd g = q.transpose() * q;
  const Eigen::VectorXd y = g.fullPivLu().solve(0.5 * g.diagonal());
  b.center = pts[0] + q * y;
  b.radius = (pts[0] - b.center).norm();
  return b;
}

/// Minimum enclosing ball by enumerating every candidate support of up to
/// n + 1 points.
inline Ball brute_force_miniball(const std::vector<Eigen::VectorXd>& pts) {
  const std::size_t n = static_cast<std::size_t>(pts[0].size());
  const std::size_t count = pts.size();
  Ball best;
  best.radius = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << count); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) > n + 1) continue;
    std::vector<Eigen::VectorXd> subset;
    for (std::size_t i = 0; i < count; ++i) {
      if (mask & (1u << i)) subset.push_back(pts[i]);
    }
    const Ball b = circumscribed(subset);
    if (b.radius < 0.0 || b.radius >= best.radius) continue;
    bool encloses = true;
    for (const auto& p : pts) {
      if ((p - b.center).norm() > b.radius * (1.0 + 1e-10) + 1e-12) {
        encloses = false;
        break;
      }
    }
    if (encloses) best = b;
  }
  return best;
}

}  // namespace oracle
