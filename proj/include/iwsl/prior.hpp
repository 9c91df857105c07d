#pragma once

#include "iwsl/block_tridiagonal.hpp"
#include "iwsl/skill_model.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace iwsl {

struct GaussianState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Sample mean and population covariance of the demos' first states,
/// regularized by 1e-8 I.
GaussianState initial_state_distribution(const DemoSet& demos);

/// Marginal moments for nodes 0..N:
///   mu_{i+1} = Phi mu_i + u,  P_{i+1} = Phi P_i Phi^T + Q.
std::vector<GaussianState> rollout_moments(const SkillModel& model, const GaussianState& init);

/// Joint Gaussian over the stacked trajectory, kept in information form.
/// The precision is block tridiagonal because the dynamics are Markov.
class GaussianTrajectoryPrior {
 public:
  GaussianTrajectoryPrior(SkillModel model, GaussianState init);

  std::size_t intervals() const { return model_.intervals(); }
  Eigen::Index dimension() const { return model_.dim; }
  double dt() const { return model_.dt; }

  const SkillModel& model() const { return model_; }
  const GaussianState& initial() const { return init_; }
  const std::vector<GaussianState>& marginals() const { return marginals_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const BlockTridiagonal& precision() const { return precision_; }

  /// (x - mu)^T K^-1 (x - mu) through the sparse precision.
  double mahalanobis_squared(const Eigen::VectorXd& x) const;

  /// Dense joint covariance from the lagged cross-covariance formula.
  /// Debug path; limited to N <= 50.
  Eigen::MatrixXd dense_covariance() const;

 private:
  SkillModel model_;
  GaussianState init_;
  std::vector<GaussianState> marginals_;
  Eigen::VectorXd mean_;
  BlockTridiagonal precision_;
};

inline constexpr double kPrecisionJitter = 1e-10;
inline constexpr std::size_t kDenseCovarianceLimit = 50;

GaussianTrajectoryPrior build_joint_prior(const SkillModel& model, const GaussianState& init);

/// Forward-simulates the stochastic dynamics; deterministic for a seed.
std::vector<StateTrajectory> sample_trajectories(const GaussianTrajectoryPrior& prior,
                                                 std::size_t count, std::uint64_t seed);

/// Symmetric square root S with S S^T = A for PSD A; negative eigenvalues
/// are clipped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a);

}  // namespace iwsl
