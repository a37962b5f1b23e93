#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace fourthkind {

class RandomStream;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned compact parameter set with per-axis bounds.
class ParameterBox {
 public:
  ParameterBox() = default;
  ParameterBox(Vector lower, Vector upper);

  std::size_t dimension() const { return static_cast<std::size_t>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& theta) const;
  Vector center() const { return 0.5 * (lower_ + upper_); }
  Vector width() const { return upper_ - lower_; }
  Vector clamp(const Vector& theta) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// Latin hypercube design with `count` points, one per stratum on each axis.
std::vector<Vector> latin_hypercube(const ParameterBox& box, std::size_t count,
                                    RandomStream& stream);

}  // namespace fourthkind
