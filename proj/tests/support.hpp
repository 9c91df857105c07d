#pragma once

#include "iwsl/batch_learning.hpp"
#include "iwsl/skill_model.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace iwsl::testing {

inline Eigen::MatrixXd gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(rng);
  return m;
}

inline Eigen::VectorXd uniform_weights(std::mt19937_64& rng, Eigen::Index count, double low = 0.05) {
  std::uniform_real_distribution<double> u(low, 1.0);
  Eigen::VectorXd w(count);
  for (Eigen::Index k = 0; k < count; ++k) w(k) = u(rng);
  return w;
}

inline DemoSet random_demos(std::mt19937_64& rng, std::size_t count, std::size_t intervals,
                            Eigen::Index dim, double dt = 0.1) {
  std::vector<StateTrajectory> demos;
  for (std::size_t k = 0; k < count; ++k) {
    StateTrajectory t;
    t.dt = dt;
    const Eigen::MatrixXd x = gaussian_matrix(rng, dim, static_cast<Eigen::Index>(intervals) + 1);
    for (Eigen::Index i = 0; i < x.cols(); ++i) t.states.push_back(x.col(i));
    demos.push_back(std::move(t));
  }
  return DemoSet(std::move(demos));
}

inline std::vector<Eigen::VectorXd> random_weights(std::mt19937_64& rng, const DemoSet& demos) {
  std::vector<Eigen::VectorXd> w;
  for (std::size_t k = 0; k < demos.size(); ++k)
    w.push_back(uniform_weights(rng, static_cast<Eigen::Index>(demos.intervals()) + 1));
  return w;
}

// Stable random dynamics with SPD noise.
inline SkillModel random_model(std::mt19937_64& rng, std::size_t intervals, Eigen::Index dim,
                               double noise = 0.05) {
  SkillModel model;
  model.dt = 0.1;
  model.dim = dim;
  for (std::size_t i = 0; i < intervals; ++i) {
    SkillStepModel step;
    step.phi_tilde.resize(dim, dim + 1);
    step.phi_tilde.col(0) = 0.3 * gaussian_matrix(rng, dim, 1);
    step.phi_tilde.rightCols(dim) =
        Eigen::MatrixXd::Identity(dim, dim) + 0.2 * gaussian_matrix(rng, dim, dim);
    const Eigen::MatrixXd a = gaussian_matrix(rng, dim, dim);
    step.q = noise * (a * a.transpose() / static_cast<double>(dim) +
                      0.1 * Eigen::MatrixXd::Identity(dim, dim));
    model.steps.push_back(step);
  }
  return model;
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace iwsl::testing
