#include "fourthkind/miniball.hpp"

#include <algorithm>
#include <cmath>
#include <list>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "fourthkind/error.hpp"
#include "fourthkind/nnls.hpp"

namespace fourthkind {

namespace {

constexpr double kPivotThreshold = 1e-12;
constexpr double kBoundaryTolerance = 1e-9;

// Smallest ball with all of `boundary` on its surface, solved in the affine
// hull: 2 Q^T Q lambda = diag(Q^T Q) with Q the differences to the first point.
Ball circumball(std::span<const Vector> points, std::span<const std::size_t> boundary) {
  if (boundary.empty()) return {Vector::Zero(points.front().size()), -1.0};
  const Vector& origin = points[boundary.front()];
  if (boundary.size() == 1) return {origin, 0.0};
  const auto m = static_cast<Eigen::Index>(boundary.size() - 1);
  Matrix q(origin.size(), m);
  for (Eigen::Index j = 0; j < m; ++j) q.col(j) = points[boundary[static_cast<std::size_t>(j) + 1]] - origin;
  const Matrix gram = q.transpose() * q;
  const Vector rhs = 0.5 * gram.diagonal();
  Vector lambda;
  const Eigen::LDLT<Matrix> ldlt(gram);
  const double max_diag = gram.diagonal().maxCoeff();
  const double min_pivot = ldlt.vectorD().cwiseAbs().minCoeff();
  if (ldlt.info() == Eigen::Success && min_pivot > kPivotThreshold * std::max(max_diag, 1e-300)) {
    lambda = ldlt.solve(rhs);
  } else {
    // Affinely dependent boundary: minimum-norm least-squares center.
    lambda = gram.completeOrthogonalDecomposition().solve(rhs);
  }
  const Vector center = origin + q * lambda;
  double radius = 0.0;
  for (const std::size_t index : boundary) radius = std::max(radius, (points[index] - center).norm());
  return {center, radius};
}

class WelzlSolver {
 public:
  WelzlSolver(std::span<const Vector> points, double scale)
      : points_(points), max_boundary_(static_cast<std::size_t>(points.front().size()) + 1), scale_(scale) {
    for (std::size_t i = 0; i < points.size(); ++i) order_.push_back(i);
    boundary_.reserve(max_boundary_);
  }

  Ball solve() {
    move_to_front(order_.end());
    return ball_;
  }

  const std::vector<std::size_t>& basis() const { return basis_; }

 private:
  bool outside(std::size_t index) const {
    if (ball_.radius < 0.0) return true;
    const double d = (points_[index] - ball_.center).norm();
    return d > ball_.radius * (1.0 + 1e-12) + 1e-15 * scale_;
  }

  void move_to_front(std::list<std::size_t>::iterator end) {
    ball_ = circumball(points_, boundary_);
    basis_ = boundary_;
    if (boundary_.size() == max_boundary_) return;
    for (auto it = order_.begin(); it != end;) {
      const auto current = it++;
      if (!outside(*current)) continue;
      boundary_.push_back(*current);
      move_to_front(current);
      boundary_.pop_back();
      if (current != order_.begin()) order_.splice(order_.begin(), order_, current);
    }
  }

  std::span<const Vector> points_;
  std::size_t max_boundary_;
  double scale_;
  std::list<std::size_t> order_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> basis_;
  Ball ball_;
};

// Boundary points carrying positive barycentric weight for the center. A
// basic NNLS solution uses at most n+1 of them.
std::vector<std::size_t> extract_support(std::span<const Vector> points, const Ball& ball,
                                         const std::vector<std::size_t>& fallback) {
  if (ball.radius == 0.0) return {fallback.empty() ? std::size_t{0} : fallback.front()};
  std::vector<std::size_t> boundary;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs((points[i] - ball.center).norm() - ball.radius) <= kBoundaryTolerance * (1.0 + ball.radius)) {
      boundary.push_back(i);
    }
  }
  const auto dim = ball.center.size();
  Matrix a(dim + 1, static_cast<Eigen::Index>(boundary.size()));
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    a.col(c).head(dim) = (points[boundary[j]] - ball.center) / ball.radius;
    a(dim, c) = 1.0;
  }
  Vector b = Vector::Zero(dim + 1);
  b[dim] = 1.0;
  const NnlsResult weights = nonnegative_least_squares(a, b);
  if (weights.residual_norm > 1e-9) return fallback;
  std::vector<std::size_t> support;
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    if (weights.x[static_cast<Eigen::Index>(j)] > 0.0) support.push_back(boundary[j]);
  }
  if (support.size() > static_cast<std::size_t>(dim) + 1) return fallback;
  return support;
}

}  // namespace

bool same_ball(const Ball& a, const Ball& b) {
  const double tol = kBoundaryTolerance * (1.0 + std::max(a.radius, b.radius));
  return (a.center - b.center).norm() <= tol && std::abs(a.radius - b.radius) <= tol;
}

MiniballResult miniball_exact(std::span<const Vector> points) {
  if (points.empty()) throw DomainError("miniball of an empty point set");
  const auto dim = points.front().size();
  if (dim == 0 || static_cast<std::size_t>(dim) > kMaxMiniballDimension) {
    throw DomainError("miniball dimension must lie in [1, 16]");
  }
  double scale = 1.0;
  for (const Vector& p : points) {
    if (p.size() != dim) throw DomainError("miniball points differ in dimension");
    if (!p.allFinite()) throw DomainError("miniball points must be finite");
    scale = std::max(scale, p.cwiseAbs().maxCoeff());
  }
  WelzlSolver solver(points, scale);
  MiniballResult result;
  result.ball = solver.solve();
  // Radius as the farthest input point keeps enclosure exact in floating point.
  double radius = 0.0;
  for (const Vector& p : points) radius = std::max(radius, (p - result.ball.center).norm());
  result.ball.radius = radius;
  for (const std::size_t index : extract_support(points, result.ball, solver.basis())) {
    result.support.indices.push_back(index);
    result.support.points.push_back(points[index]);
  }
  return result;
}

SupportSet prune_support(std::span<const Vector> points, const Ball& ball) {
  if (points.empty()) return {};
  const std::size_t limit = static_cast<std::size_t>(points.front().size()) + 1;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs((points[i] - ball.center).norm() - ball.radius) <= kBoundaryTolerance * (1.0 + ball.radius)) {
      kept.push_back(i);
    }
  }
  if (kept.empty()) kept.push_back(0);

  std::vector<Vector> subset;
  while (kept.size() > limit) {
    bool removed = false;
    for (std::size_t k = 0; k < kept.size(); ++k) {
      subset.clear();
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (j != k) subset.push_back(points[kept[j]]);
      }
      if (same_ball(miniball_exact(subset).ball, ball)) {
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(k));
        removed = true;
        break;
      }
    }
    // Caratheodory guarantees a removable point in exact arithmetic.
    if (!removed) break;
  }
  SupportSet support;
  for (const std::size_t index : kept) {
    support.indices.push_back(index);
    support.points.push_back(points[index]);
  }
  return support;
}

}  // namespace fourthkind
