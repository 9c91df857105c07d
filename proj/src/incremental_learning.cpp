#include "iwsl/incremental_learning.hpp"

#include "iwsl/error.hpp"

#include <cmath>
#include <string>

namespace iwsl {

IncrementalLearner IncrementalLearner::init_prior(std::size_t intervals, Eigen::Index dim,
                                                  double alpha, double beta, double dt) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "alpha and beta must be positive");
  }
  if (intervals < 1 || dim < 1) fail(ErrorCode::kInvalidArgument, "need N >= 1 and D >= 1");

  MniwState prior;
  prior.m = Eigen::MatrixXd::Zero(dim, dim + 1);
  prior.r = Eigen::MatrixXd::Identity(dim + 1, dim + 1) / alpha;
  prior.v = Eigen::MatrixXd::Identity(dim, dim) / beta;
  prior.nu = 1.0 / beta;
  return IncrementalLearner(std::vector<MniwState>(intervals, prior), alpha, beta, 0, dt);
}

IncrementalLearner::IncrementalLearner(std::vector<MniwState> steps, double alpha, double beta,
                                       std::size_t demos_seen, double dt)
    : steps_(std::move(steps)), alpha_(alpha), beta_(beta), dt_(dt), demos_seen_(demos_seen) {
  if (steps_.empty()) fail(ErrorCode::kInvalidArgument, "learner has no intervals");
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "alpha and beta must be positive");
  }
  dim_ = steps_.front().m.rows();
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    const auto& s = steps_[i];
    if (s.m.rows() != dim_ || s.m.cols() != dim_ + 1 || s.r.rows() != dim_ + 1 ||
        s.r.cols() != dim_ + 1 || s.v.rows() != dim_ || s.v.cols() != dim_) {
      fail(ErrorCode::kDimensionMismatch, "interval " + std::to_string(i) + " has bad shapes");
    }
    const double expected_nu = 1.0 / beta + static_cast<double>(demos_seen);
    if (!(std::abs(s.nu - expected_nu) <= 1e-9 * expected_nu)) {
      fail(ErrorCode::kInvalidArgument,
           "interval " + std::to_string(i) + " degrees of freedom disagree with demos_seen");
    }
  }
  refactor();
}

void IncrementalLearner::refactor() {
  factors_.clear();
  factors_.reserve(steps_.size());
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    factors_.emplace_back(steps_[i].r);
    if (factors_.back().info() != Eigen::Success) {
      fail(ErrorCode::kSingularSystem, "R of interval " + std::to_string(i) + " is not SPD");
    }
  }
}

void IncrementalLearner::assimilate(const StateTrajectory& demo, const Eigen::VectorXd& weights) {
  if (demo.intervals() != steps_.size() || demo.dimension() != dim_) {
    fail(ErrorCode::kGridMismatch,
         "demo grid (N = " + std::to_string(demo.intervals()) + ", D = " +
             std::to_string(demo.dimension()) + ") does not match learner (N = " +
             std::to_string(steps_.size()) + ", D = " + std::to_string(dim_) + ")");
  }
  if (dt_ > 0.0 && std::abs(demo.dt - dt_) > 1e-9 * dt_) {
    fail(ErrorCode::kGridMismatch, "demo dt does not match learner dt");
  }
  if (weights.size() != static_cast<Eigen::Index>(demo.states.size())) {
    fail(ErrorCode::kDimensionMismatch, "need one weight per trajectory node");
  }
  if (!(weights.array() > 0.0).all() || !(weights.array() <= 1.0).all()) {
    fail(ErrorCode::kInvalidArgument, "weights must lie in (0, 1]");
  }

  for (std::size_t i = 0; i < steps_.size(); ++i) {
    MniwState& s = steps_[i];
    const double w = weights(static_cast<Eigen::Index>(i));
    Eigen::VectorXd input(dim_ + 1);
    input << 1.0, demo.states[i];
    const Eigen::VectorXd& target = demo.states[i + 1];

    const Eigen::MatrixXd m_prev = s.m;
    const Eigen::MatrixXd r_prev = s.r;

    s.r.noalias() += w * input * input.transpose();
    factors_[i].rankUpdate(std::sqrt(w) * input);
    if (factors_[i].info() != Eigen::Success) {
      fail(ErrorCode::kSingularSystem, "Cholesky update of R failed at interval " +
                                           std::to_string(i));
    }

    // (w x x~^T + M_prev R_prev) R^-1, with M_prev R_prev = M_prev (R - w x~ x~^T):
    // M = M_prev + w (x - M_prev x~) x~^T R^-1.
    const Eigen::VectorXd innovation = target - m_prev * input;
    const Eigen::VectorXd gain = factors_[i].solve(input);
    s.m = m_prev + w * innovation * gain.transpose();

    const Eigen::VectorXd residual = target - s.m * input;
    const Eigen::MatrixXd shift = s.m - m_prev;
    Eigen::MatrixXd v = s.v + w * residual * residual.transpose() +
                        shift * r_prev * shift.transpose();
    s.v = 0.5 * (v + v.transpose());
    // Recomputed rather than accumulated so it stays exactly 1/beta + K.
    s.nu = 1.0 / beta_ + static_cast<double>(demos_seen_ + 1);
  }
  if (dt_ <= 0.0) dt_ = demo.dt;
  ++demos_seen_;
}

SkillModel IncrementalLearner::extract_map() const {
  SkillModel model;
  model.dt = dt_;
  model.dim = dim_;
  model.steps.reserve(steps_.size());
  for (const auto& s : steps_) {
    SkillStepModel step;
    step.phi_tilde = s.m;
    const Eigen::MatrixXd q = s.v / (s.nu + static_cast<double>(dim_) + 1.0);
    step.q = 0.5 * (q + q.transpose());
    model.steps.push_back(std::move(step));
  }
  return model;
}

}  // namespace iwsl
