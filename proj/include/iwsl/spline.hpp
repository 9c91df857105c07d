#pragma once

#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace iwsl {

/// Piecewise cubic interpolant of a RawDemo, one set of coefficients per
/// position dimension. Uses not-a-knot end conditions, so data sampled from
/// any cubic polynomial is reproduced exactly.
class CubicSpline {
 public:
  /// Throws kInvalidArgument for fewer than 4 samples or non-increasing time.
  static CubicSpline fit(const RawDemo& demo);

  double t_first() const { return knots_.front(); }
  double t_last() const { return knots_.back(); }
  Eigen::Index dimension() const { return values_.cols(); }

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd derivative(double t) const;

 private:
  std::size_t segment(double t) const;

  std::vector<double> knots_;
  Eigen::MatrixXd values_;   // knots x P
  Eigen::MatrixXd second_;   // second derivatives at knots, knots x P
};

}  // namespace iwsl
