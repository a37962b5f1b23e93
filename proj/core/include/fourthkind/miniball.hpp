#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fourthkind/types.hpp"

namespace fourthkind {

struct Ball {
  Vector center;
  double radius = 0.0;

  bool contains(const Vector& point, double relative_slack = 0.0) const {
    return (point - center).norm() <= radius * (1.0 + relative_slack);
  }
  /// Ball with the same center and radius scaled by `factor`.
  Ball enlarged(double factor) const { return {center, radius * factor}; }
};

/// Boundary points that determine a ball; `indices` refer to the input list.
struct SupportSet {
  std::vector<Vector> points;
  std::vector<std::size_t> indices;

  std::size_t size() const { return points.size(); }
};

struct MiniballResult {
  Ball ball;
  SupportSet support;
};

inline constexpr std::size_t kMaxMiniballDimension = 16;

/// Exact minimum enclosing ball by move-to-front Welzl recursion. The
/// support holds at most n+1 boundary points with the center in their
/// convex hull.
MiniballResult miniball_exact(std::span<const Vector> points);

/// Two balls are treated as equal when centers and radii agree to
/// 1e-9 (1 + radius).
bool same_ball(const Ball& a, const Ball& b);

/// Reduces `points` to at most n+1 points with the same minimum enclosing
/// ball. Points off the boundary are dropped first; then, while more than
/// n+1 remain, the first point (in list order) whose removal leaves the ball
/// unchanged is removed.
SupportSet prune_support(std::span<const Vector> points, const Ball& ball);

}  // namespace fourthkind
