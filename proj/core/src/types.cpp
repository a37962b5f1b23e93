#include "fourthkind/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fourthkind/error.hpp"
#include "fourthkind/numerics.hpp"

namespace fourthkind {

ParameterBox::ParameterBox(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0) throw DomainError("parameter box must have at least one axis");
  if (lower_.size() != upper_.size()) throw DomainError("parameter box bounds differ in length");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]) || lower_[i] > upper_[i]) {
      throw DomainError("parameter box requires finite bounds with lower <= upper");
    }
  }
}

bool ParameterBox::contains(const Vector& theta) const {
  if (theta.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!(theta[i] >= lower_[i] && theta[i] <= upper_[i])) return false;
  }
  return true;
}

Vector ParameterBox::clamp(const Vector& theta) const {
  return theta.cwiseMax(lower_).cwiseMin(upper_);
}

std::vector<Vector> latin_hypercube(const ParameterBox& box, std::size_t count,
                                    RandomStream& stream) {
  const std::size_t k = box.dimension();
  std::vector<Vector> points(count, Vector(static_cast<Eigen::Index>(k)));
  std::vector<std::size_t> strata(count);
  for (std::size_t axis = 0; axis < k; ++axis) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    // Fisher-Yates with the stream so the design is reproducible.
    for (std::size_t i = count; i > 1; --i) {
      std::swap(strata[i - 1], strata[stream.below(i)]);
    }
    const auto a = static_cast<Eigen::Index>(axis);
    for (std::size_t i = 0; i < count; ++i) {
      const double u = (static_cast<double>(strata[i]) + stream.uniform()) / static_cast<double>(count);
      points[i][a] = box.lower()[a] + u * (box.upper()[a] - box.lower()[a]);
    }
  }
  return points;
}

}  // namespace fourthkind
