#include "iwsl/spline.hpp"

#include "iwsl/demonstrations.hpp"
#include "iwsl/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace iwsl {

CubicSpline CubicSpline::fit(const RawDemo& demo) {
  validate(demo);

  CubicSpline spline;
  spline.knots_ = demo.timestamps;
  spline.values_ = demo.positions;

  const auto n = static_cast<Eigen::Index>(demo.size());
  const auto& t = spline.knots_;
  const Eigen::MatrixXd& y = spline.values_;
  auto h = [&](Eigen::Index j) { return t[j + 1] - t[j]; };

  // Unknowns are the second derivatives at the knots. Interior rows enforce
  // C2 continuity; the first and last rows make the third derivative
  // continuous across the second and second-to-last knots.
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, y.cols());

  entries.emplace_back(0, 0, h(1));
  entries.emplace_back(0, 1, -(h(0) + h(1)));
  entries.emplace_back(0, 2, h(0));
  for (Eigen::Index j = 1; j + 1 < n; ++j) {
    entries.emplace_back(j, j - 1, h(j - 1));
    entries.emplace_back(j, j, 2.0 * (h(j - 1) + h(j)));
    entries.emplace_back(j, j + 1, h(j));
    rhs.row(j) = 6.0 * ((y.row(j + 1) - y.row(j)) / h(j) - (y.row(j) - y.row(j - 1)) / h(j - 1));
  }
  entries.emplace_back(n - 1, n - 3, h(n - 2));
  entries.emplace_back(n - 1, n - 2, -(h(n - 3) + h(n - 2)));
  entries.emplace_back(n - 1, n - 1, h(n - 3));

  Eigen::SparseMatrix<double> system(n, n);
  system.setFromTriplets(entries.begin(), entries.end());

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) {
    fail(ErrorCode::kSingularSystem, "cubic spline system could not be factorized");
  }
  spline.second_ = lu.solve(rhs);
  return spline;
}

std::size_t CubicSpline::segment(double t) const {
  if (t < knots_.front() - 1e-12 * (1.0 + std::abs(knots_.front())) ||
      t > knots_.back() + 1e-12 * (1.0 + std::abs(knots_.back()))) {
    fail(ErrorCode::kOutOfBounds, "spline evaluated outside its time span");
  }
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(knots_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, knots_.size() - 1) - 1;
}

Eigen::VectorXd CubicSpline::value(double t) const {
  const auto j = static_cast<Eigen::Index>(segment(t));
  const double h = knots_[j + 1] - knots_[j];
  const double a = (knots_[j + 1] - t) / h;
  const double b = (t - knots_[j]) / h;
  return (a * values_.row(j) + b * values_.row(j + 1) +
          ((a * a * a - a) * second_.row(j) + (b * b * b - b) * second_.row(j + 1)) *
              (h * h / 6.0))
      .transpose();
}

Eigen::VectorXd CubicSpline::derivative(double t) const {
  const auto j = static_cast<Eigen::Index>(segment(t));
  const double h = knots_[j + 1] - knots_[j];
  const double a = (knots_[j + 1] - t) / h;
  const double b = (t - knots_[j]) / h;
  return ((values_.row(j + 1) - values_.row(j)) / h -
          (3.0 * a * a - 1.0) / 6.0 * h * second_.row(j) +
          (3.0 * b * b - 1.0) / 6.0 * h * second_.row(j + 1))
      .transpose();
}

}  // namespace iwsl
