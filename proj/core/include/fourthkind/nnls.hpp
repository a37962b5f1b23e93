#pragma once

#include "fourthkind/types.hpp"

namespace fourthkind {

struct NnlsResult {
  Vector x;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Lawson-Hanson active-set solver for min |A x - b| subject to x >= 0.
/// The solution is basic: at most rank(A) entries are nonzero.
NnlsResult nonnegative_least_squares(const Matrix& a, const Vector& b, int max_iterations = 0);

}  // namespace fourthkind
