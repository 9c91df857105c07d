#include "iwsl/prior.hpp"

#include "iwsl/error.hpp"

#include <random>
#include <string>

namespace iwsl {
namespace {

Eigen::MatrixXd jittered_inverse(const Eigen::MatrixXd& a, const std::string& what) {
  Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  sym.diagonal().array() += kPrecisionJitter;
  const Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) fail(ErrorCode::kSingularSystem, what + " is not PSD");
  return llt.solve(Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

}  // namespace

GaussianState initial_state_distribution(const DemoSet& demos) {
  const Eigen::Index d = demos.dimension();
  const auto k = static_cast<double>(demos.size());
  GaussianState init;
  init.mean = Eigen::VectorXd::Zero(d);
  for (const auto& demo : demos.demos()) init.mean += demo.states.front();
  init.mean /= k;
  init.cov = 1e-8 * Eigen::MatrixXd::Identity(d, d);
  for (const auto& demo : demos.demos()) {
    const Eigen::VectorXd c = demo.states.front() - init.mean;
    init.cov.noalias() += c * c.transpose() / k;
  }
  return init;
}

std::vector<GaussianState> rollout_moments(const SkillModel& model, const GaussianState& init) {
  model.validate();
  if (init.mean.size() != model.dim || init.cov.rows() != model.dim ||
      init.cov.cols() != model.dim) {
    fail(ErrorCode::kDimensionMismatch, "initial state does not match model dimension");
  }
  std::vector<GaussianState> out;
  out.reserve(model.intervals() + 1);
  out.push_back(init);
  for (const auto& step : model.steps) {
    const GaussianState& prev = out.back();
    const Eigen::MatrixXd phi = step.transition();
    GaussianState next;
    next.mean = step.apply(prev.mean);
    next.cov = phi * prev.cov * phi.transpose() + step.q;
    next.cov = 0.5 * (next.cov + next.cov.transpose());
    out.push_back(std::move(next));
  }
  return out;
}

GaussianTrajectoryPrior::GaussianTrajectoryPrior(SkillModel model, GaussianState init)
    : model_(std::move(model)), init_(std::move(init)) {
  marginals_ = rollout_moments(model_, init_);

  const Eigen::Index d = model_.dim;
  const std::size_t n = model_.intervals();
  mean_.resize(static_cast<Eigen::Index>(n + 1) * d);
  for (std::size_t i = 0; i <= n; ++i) {
    mean_.segment(static_cast<Eigen::Index>(i) * d, d) = marginals_[i].mean;
  }

  // Unary factor on x_0 plus one binary factor per transition
  // r = x_{i+1} - Phi x_i - u with information Q^-1.
  precision_ = BlockTridiagonal(n + 1, d);
  precision_.diagonal[0] += jittered_inverse(init_.cov, "initial covariance");
  for (std::size_t i = 0; i < n; ++i) {
    const auto& step = model_.steps[i];
    const Eigen::MatrixXd info = jittered_inverse(step.q, "Q of step " + std::to_string(i));
    const Eigen::MatrixXd phi = step.transition();
    precision_.diagonal[i] += phi.transpose() * info * phi;
    precision_.diagonal[i + 1] += info;
    precision_.lower[i] -= info * phi;
  }
}

double GaussianTrajectoryPrior::mahalanobis_squared(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size()) {
    fail(ErrorCode::kDimensionMismatch, "stacked trajectory has the wrong size");
  }
  const Eigen::VectorXd r = x - mean_;
  return r.dot(precision_.multiply(r));
}

Eigen::MatrixXd GaussianTrajectoryPrior::dense_covariance() const {
  const std::size_t n = intervals();
  if (n > kDenseCovarianceLimit) {
    fail(ErrorCode::kInvalidArgument, "dense covariance is limited to N <= 50");
  }
  const Eigen::Index d = dimension();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1) * d,
                                            static_cast<Eigen::Index>(n + 1) * d);
  for (std::size_t i = 0; i <= n; ++i) {
    // cov(x_j, x_i) = Phi_j ... Phi_{i+1} P_i for j >= i.
    Eigen::MatrixXd lagged = marginals_[i].cov;
    const auto ii = static_cast<Eigen::Index>(i) * d;
    k.block(ii, ii, d, d) = lagged;
    for (std::size_t j = i + 1; j <= n; ++j) {
      lagged = model_.steps[j - 1].transition() * lagged;
      const auto jj = static_cast<Eigen::Index>(j) * d;
      k.block(jj, ii, d, d) = lagged;
      k.block(ii, jj, d, d) = lagged.transpose();
    }
  }
  return k;
}

GaussianTrajectoryPrior build_joint_prior(const SkillModel& model, const GaussianState& init) {
  return GaussianTrajectoryPrior(model, init);
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& a) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
  const Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<StateTrajectory> sample_trajectories(const GaussianTrajectoryPrior& prior,
                                                 std::size_t count, std::uint64_t seed) {
  if (count < 1) fail(ErrorCode::kInvalidArgument, "need at least one sample");
  const SkillModel& model = prior.model();
  const Eigen::Index d = model.dim;

  std::vector<Eigen::MatrixXd> noise_roots;
  noise_roots.reserve(model.intervals());
  for (const auto& step : model.steps) noise_roots.push_back(psd_sqrt(step.q));
  const Eigen::MatrixXd init_root = psd_sqrt(prior.initial().cov);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  auto draw = [&] {
    Eigen::VectorXd z(d);
    for (Eigen::Index a = 0; a < d; ++a) z(a) = normal(rng);
    return z;
  };

  std::vector<StateTrajectory> samples(count);
  for (auto& traj : samples) {
    traj.dt = model.dt;
    traj.states.reserve(model.intervals() + 1);
    traj.states.push_back(prior.initial().mean + init_root * draw());
    for (std::size_t i = 0; i < model.intervals(); ++i) {
      traj.states.push_back(model.steps[i].apply(traj.states.back()) + noise_roots[i] * draw());
    }
  }
  return samples;
}

}  // namespace iwsl
