#pragma once

#include <Eigen/Dense>

#include <vector>

namespace iwsl {

/// One interval of x_{i+1} = Phi_tilde [1; x_i] + w, w ~ N(0, Q).
/// Phi_tilde is D x (D+1) = [u | Phi].
struct SkillStepModel {
  Eigen::MatrixXd phi_tilde;
  Eigen::MatrixXd q;

  Eigen::VectorXd bias() const { return phi_tilde.col(0); }
  Eigen::MatrixXd transition() const { return phi_tilde.rightCols(phi_tilde.cols() - 1); }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return phi_tilde.col(0) + transition() * x;
  }
};

/// Time-varying linear stochastic dynamics over N intervals.
struct SkillModel {
  double dt = 0.0;
  Eigen::Index dim = 0;
  std::vector<SkillStepModel> steps;

  std::size_t intervals() const { return steps.size(); }
  void validate() const;
};

}  // namespace iwsl
