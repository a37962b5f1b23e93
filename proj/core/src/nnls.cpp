#include "fourthkind/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "fourthkind/error.hpp"

namespace fourthkind {

namespace {

Vector solve_passive(const Matrix& a, const Vector& b, const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
  }
  Matrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
  const Vector sol = sub.colPivHouseholderQr().solve(b);
  Vector full = Vector::Zero(a.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) full[cols[c]] = sol[static_cast<Eigen::Index>(c)];
  return full;
}

}  // namespace

NnlsResult nonnegative_least_squares(const Matrix& a, const Vector& b, int max_iterations) {
  if (a.rows() != b.size()) throw DomainError("nnls: dimension mismatch");
  const Eigen::Index n = a.cols();
  if (max_iterations <= 0) max_iterations = static_cast<int>(30 * std::max<Eigen::Index>(n, 1));
  NnlsResult result;
  result.x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);

  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff() * std::max(1.0, b.cwiseAbs().maxCoeff()));
  const double tol = 1e-13 * scale * static_cast<double>(std::max<Eigen::Index>(n, a.rows()));

  Vector w = a.transpose() * (b - a * result.x);
  while (result.iterations < max_iterations) {
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = true;

    while (result.iterations++ < max_iterations) {
      const Vector s = solve_passive(a, b, passive);
      bool all_positive = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) all_positive = false;
      }
      if (all_positive) {
        result.x = s;
        break;
      }
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && s[j] <= 0.0) {
          step = std::min(step, result.x[j] / (result.x[j] - s[j]));
        }
      }
      result.x += step * (s - result.x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && result.x[j] <= 1e-15 * scale) {
          passive[static_cast<std::size_t>(j)] = false;
          result.x[j] = 0.0;
        }
      }
    }
    w = a.transpose() * (b - a * result.x);
  }
  result.residual_norm = (a * result.x - b).norm();
  return result;
}

}  // namespace fourthkind
