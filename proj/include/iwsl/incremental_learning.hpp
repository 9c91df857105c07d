#pragma once

#include "iwsl/skill_model.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <vector>

namespace iwsl {

/// Matrix-normal inverse-Wishart belief over one interval's (Phi_tilde, Q):
/// Phi_tilde | Q ~ MN(M, Q, R^-1 form via R), Q ~ IW(V, nu).
struct MniwState {
  Eigen::MatrixXd m;  // D x (D+1)
  Eigen::MatrixXd r;  // (D+1) x (D+1), SPD
  Eigen::MatrixXd v;  // D x D, SPD
  double nu = 0.0;
};

/// Conjugate per-interval learner that assimilates one weighted
/// demonstration at a time.
class IncrementalLearner {
 public:
  /// Ridge prior M = 0, R = I/alpha and uninformed IW prior V = I/beta,
  /// nu = 1/beta on every interval.
  static IncrementalLearner init_prior(std::size_t intervals, Eigen::Index dim, double alpha,
                                       double beta, double dt = 0.0);

  /// Rebuilds a learner from stored state (e.g. a checkpoint).
  IncrementalLearner(std::vector<MniwState> steps, double alpha, double beta,
                     std::size_t demos_seen, double dt);

  /// Applies the conjugate update laws to every interval. `weights` holds
  /// w(x_i) for nodes 0..N, each in (0, 1].
  void assimilate(const StateTrajectory& demo, const Eigen::VectorXd& weights);

  /// Posterior mode: Phi_tilde = M, Q = V / (nu + D + 1).
  SkillModel extract_map() const;

  const std::vector<MniwState>& steps() const { return steps_; }
  std::size_t intervals() const { return steps_.size(); }
  Eigen::Index dimension() const { return dim_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double dt() const { return dt_; }
  std::size_t demos_seen() const { return demos_seen_; }

 private:
  IncrementalLearner() = default;
  void refactor();

  std::vector<MniwState> steps_;
  // Cholesky factors of each R, kept current with rank-one updates.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  Eigen::Index dim_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double dt_ = 0.0;
  std::size_t demos_seen_ = 0;
};

}  // namespace iwsl
