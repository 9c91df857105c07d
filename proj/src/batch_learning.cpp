#include "iwsl/batch_learning.hpp"

#include "iwsl/error.hpp"

#include <algorithm>
#include <string>

namespace iwsl {

void SkillModel::validate() const {
  if (steps.empty()) fail(ErrorCode::kInvalidArgument, "skill model has no steps");
  if (!(dt > 0.0)) fail(ErrorCode::kInvalidArgument, "skill model dt must be positive");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    if (s.phi_tilde.rows() != dim || s.phi_tilde.cols() != dim + 1 || s.q.rows() != dim ||
        s.q.cols() != dim) {
      fail(ErrorCode::kDimensionMismatch, "skill model step " + std::to_string(i) +
                                              " does not match D = " + std::to_string(dim));
    }
  }
}

StepData assemble_step_data(const DemoSet& demos, const std::vector<Eigen::VectorXd>& weights,
                            std::size_t step) {
  if (step >= demos.intervals()) {
    fail(ErrorCode::kInvalidArgument, "step index " + std::to_string(step) + " out of range");
  }
  if (weights.size() != demos.size()) {
    fail(ErrorCode::kDimensionMismatch, "need one weight list per demonstration");
  }
  const Eigen::Index d = demos.dimension();
  const auto k_count = static_cast<Eigen::Index>(demos.size());

  StepData data;
  data.inputs.resize(d + 1, k_count);
  data.targets.resize(d, k_count);
  data.weights.resize(k_count);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const auto& demo = demos[static_cast<std::size_t>(k)];
    const auto& w = weights[static_cast<std::size_t>(k)];
    if (w.size() <= static_cast<Eigen::Index>(step)) {
      fail(ErrorCode::kDimensionMismatch,
           "weights of demo " + std::to_string(k) + " do not cover node " + std::to_string(step));
    }
    data.inputs(0, k) = 1.0;
    data.inputs.col(k).tail(d) = demo.states[step];
    data.targets.col(k) = demo.states[step + 1];
    data.weights(k) = w(static_cast<Eigen::Index>(step));
  }
  return data;
}

double weight_normalizer(const Eigen::VectorXd& weights) {
  const double trace = weights.sum();
  return (trace * trace - weights.squaredNorm()) / trace;
}

bool degenerate_normalizer(double z, const Eigen::VectorXd& weights) {
  return z <= std::max(1e-12, 1e-6 * weights.sum());
}

double default_ridge(const StepData& data) {
  const double trace =
      (data.inputs.array().square().rowwise() * data.weights.transpose().array()).sum();
  return 1e-10 * trace / static_cast<double>(data.inputs.rows());
}

StepEstimate batch_estimate_step(const StepData& data, const BatchOptions& options) {
  const Eigen::Index d = data.targets.rows();
  const Eigen::Index k_count = data.inputs.cols();
  if (data.inputs.rows() != d + 1 || data.targets.cols() != k_count ||
      data.weights.size() != k_count || k_count == 0) {
    fail(ErrorCode::kDimensionMismatch, "inconsistent step data shapes");
  }
  if (!(data.weights.array() > 0.0).all()) {
    fail(ErrorCode::kInvalidArgument, "importance weights must be positive");
  }

  StepEstimate est;
  est.lambda = options.lambda.value_or(default_ridge(data));
  if (!(est.lambda >= 0.0)) fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");

  const Eigen::MatrixXd weighted_inputs = data.inputs * data.weights.asDiagonal();
  Eigen::MatrixXd gram = weighted_inputs * data.inputs.transpose();
  gram.diagonal().array() += est.lambda;
  const Eigen::MatrixXd cross = weighted_inputs * data.targets.transpose();  // X~ W X^T

  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-15) {
    fail(ErrorCode::kSingularSystem, "weighted normal equations are singular");
  }
  est.model.phi_tilde = llt.solve(cross).transpose();

  const Eigen::MatrixXd residuals = data.targets - est.model.phi_tilde * data.inputs;
  est.normalizer = weight_normalizer(data.weights);
  if (degenerate_normalizer(est.normalizer, data.weights)) {
    est.degenerate_weights = true;
    est.model.q = options.q_min * Eigen::MatrixXd::Identity(d, d);
  } else {
    const Eigen::MatrixXd q =
        residuals * data.weights.asDiagonal() * residuals.transpose() / est.normalizer;
    est.model.q = 0.5 * (q + q.transpose());
  }
  return est;
}

std::vector<Eigen::VectorXd> unit_weights(const DemoSet& demos) {
  return std::vector<Eigen::VectorXd>(
      demos.size(), Eigen::VectorXd::Ones(static_cast<Eigen::Index>(demos.intervals() + 1)));
}

BatchResult learn_batch(const DemoSet& demos, const std::vector<Eigen::VectorXd>& weights,
                        const BatchOptions& options) {
  BatchResult result;
  result.weights = weights;
  result.model.dt = demos.dt();
  result.model.dim = demos.dimension();
  result.model.steps.reserve(demos.intervals());
  for (std::size_t i = 0; i < demos.intervals(); ++i) {
    try {
      const StepEstimate est = batch_estimate_step(assemble_step_data(demos, weights, i), options);
      if (est.degenerate_weights) result.degenerate_steps.push_back(i);
      result.model.steps.push_back(est.model);
    } catch (const Error& e) {
      throw Error(e.code(), "step " + std::to_string(i) + ": " + e.what());
    }
  }
  return result;
}

BatchResult learn_batch(const DemoSet& demos, const DistanceSource* scene,
                        const WeightParams& params, const BatchOptions& options) {
  if (scene == nullptr) return learn_batch(demos, unit_weights(demos), options);
  std::vector<Eigen::VectorXd> weights;
  weights.reserve(demos.size());
  for (const auto& demo : demos.demos()) weights.push_back(weight_trajectory(demo, *scene, params));
  return learn_batch(demos, weights, options);
}

}  // namespace iwsl
