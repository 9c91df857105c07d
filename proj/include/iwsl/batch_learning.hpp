#pragma once

#include "iwsl/environment.hpp"
#include "iwsl/skill_model.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace iwsl {

/// Regression data for one interval (t_i, t_{i+1}] across K demonstrations.
struct StepData {
  Eigen::MatrixXd inputs;   // (D+1) x K, columns [1; x_i^k]
  Eigen::MatrixXd targets;  // D x K, columns x_{i+1}^k
  Eigen::VectorXd weights;  // diagonal of W_i, w(x_i^k)
};

StepData assemble_step_data(const DemoSet& demos, const std::vector<Eigen::VectorXd>& weights,
                            std::size_t step);

struct BatchOptions {
  // Ridge strength. Unset selects 1e-10 * tr(X W X^T) / (D+1) per interval.
  std::optional<double> lambda;
  // Isotropic noise floor used when the weights leave no effective dof.
  double q_min = 1e-6;
};

struct StepEstimate {
  SkillStepModel model;
  double normalizer = 0.0;  // z = (tr(W)^2 - tr(W^T W)) / tr(W)
  double lambda = 0.0;
  bool degenerate_weights = false;
};

/// z for a weight vector.
double weight_normalizer(const Eigen::VectorXd& weights);

/// True when z carries no effective residual degrees of freedom.
bool degenerate_normalizer(double z, const Eigen::VectorXd& weights);

double default_ridge(const StepData& data);

/// Weighted ridge regression for one interval:
///   Phi_tilde = X W X~^T (X~ W X~^T + lambda I)^-1,  Q = E W E^T / z.
/// Throws kSingularSystem when lambda = 0 and X~ W X~^T is singular.
StepEstimate batch_estimate_step(const StepData& data, const BatchOptions& options = {});

struct BatchResult {
  SkillModel model;
  std::vector<Eigen::VectorXd> weights;     // per demo, per node
  std::vector<std::size_t> degenerate_steps;
};

/// Learns every interval from precomputed per-demo weights.
BatchResult learn_batch(const DemoSet& demos, const std::vector<Eigen::VectorXd>& weights,
                        const BatchOptions& options = {});

/// Learns every interval with weights from `scene`; a null scene means
/// unit weights.
BatchResult learn_batch(const DemoSet& demos, const DistanceSource* scene,
                        const WeightParams& params, const BatchOptions& options = {});

/// Unit weights for every node of every demo.
std::vector<Eigen::VectorXd> unit_weights(const DemoSet& demos);

}  // namespace iwsl
