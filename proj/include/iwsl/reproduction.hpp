#pragma once

#include "iwsl/environment.hpp"
#include "iwsl/prior.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <memory>
#include <variant>
#include <vector>

namespace iwsl {

/// Gaussian likelihood pulling node `index` towards `target`.
struct StateAnchor {
  std::size_t index = 0;
  Eigen::VectorXd target;
  Eigen::MatrixXd sigma;  // D x D, SPD
};

/// Hinge likelihood keeping node `index` outside the danger band of `sdf`.
struct ObstacleFactor {
  std::size_t index = 0;
  std::shared_ptr<const SignedDistanceField> sdf;
  double eps_repro = 0.1;
  double sigma_repro = 0.05;
};

using EventFactor = std::variant<StateAnchor, ObstacleFactor>;

struct OptimizerOptions {
  int max_iters = 100;
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double lm_damping_init = 1e-4;
  double tol_clear = 0.01;
};

struct ReproductionProblem {
  GaussianTrajectoryPrior prior;
  std::vector<EventFactor> factors;
  OptimizerOptions options;

  void validate() const;
};

struct Solution {
  StateTrajectory trajectory;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Every obstacle-factor node clears eps_repro - tol_clear.
  bool feasible = true;
  // Smallest distance over obstacle-factor nodes; kNoObstacleDistance if none.
  double min_clearance = kNoObstacleDistance;
  // Objective at the start and after each accepted step.
  std::vector<double> objective_history;
};

struct ObstacleCost {
  double cost = 0.0;
  Eigen::VectorXd gradient;  // over the full state; velocity part is zero
};

/// Hinge cost of a state's position against the field, with its gradient.
ObstacleCost obstacle_cost(const Eigen::VectorXd& state, const SignedDistanceField& sdf,
                           double eps_repro);

/// One obstacle factor on every node 0..N.
std::vector<EventFactor> obstacle_factors(std::shared_ptr<const SignedDistanceField> sdf,
                                          std::size_t intervals, double eps_repro,
                                          double sigma_repro);

/// 1/2 |x - mu|^2_K + sum over factors of 1/2 |h|^2_Sigma.
double negative_log_posterior(const Eigen::VectorXd& x, const ReproductionProblem& problem);

/// Levenberg-Marquardt from the prior mean. Normal equations stay block
/// tridiagonal since every factor touches a single node. Throws
/// kSingularNormalEquations if damping cannot make them solvable.
Solution optimize_map(const ReproductionProblem& problem);

}  // namespace iwsl
