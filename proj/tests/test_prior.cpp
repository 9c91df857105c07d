#include "iwsl/error.hpp"
#include "iwsl/prior.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace iwsl {
namespace {

using testing::relative_error;

SkillModel scalar_model(std::size_t intervals, double phi, double u, double q) {
  SkillModel model;
  model.dt = 1.0;
  model.dim = 1;
  for (std::size_t i = 0; i < intervals; ++i) {
    SkillStepModel step;
    step.phi_tilde = Eigen::RowVector2d(u, phi);
    step.q = Eigen::MatrixXd::Constant(1, 1, q);
    model.steps.push_back(step);
  }
  return model;
}

GaussianState random_state(std::mt19937_64& rng, Eigen::Index dim) {
  const Eigen::MatrixXd a = testing::gaussian_matrix(rng, dim, dim);
  return {testing::gaussian_matrix(rng, dim, 1).col(0),
          0.1 * a * a.transpose() + 0.01 * Eigen::MatrixXd::Identity(dim, dim)};
}

Eigen::Index block_of(Eigen::Index k, Eigen::Index dim) { return k / dim; }

TEST(InitialState, SingleDemo) {
  std::mt19937_64 rng(31);
  const DemoSet demos = testing::random_demos(rng, 1, 3, 4);
  const GaussianState g = initial_state_distribution(demos);
  EXPECT_EQ(g.mean, demos[0].states[0]);
  EXPECT_EQ(g.cov, 1e-8 * Eigen::MatrixXd::Identity(4, 4));
}

TEST(InitialState, SymmetricPair) {
  StateTrajectory a{1.0, {Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Zero(1)}};
  StateTrajectory b{1.0, {Eigen::VectorXd::Constant(1, -0.3), Eigen::VectorXd::Zero(1)}};
  const GaussianState g = initial_state_distribution(DemoSet({a, b}));
  EXPECT_EQ(g.mean(0), 0.0);
  EXPECT_NEAR(g.cov(0, 0), 0.09 + 1e-8, 1e-16);
}

TEST(InitialState, MatchesDirectMoments) {
  std::mt19937_64 rng(32);
  const DemoSet demos = testing::random_demos(rng, 10, 2, 3);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& d : demos.demos()) mean += d.states[0];
  mean /= 10.0;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& d : demos.demos()) {
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cov(r, c) += (d.states[0](r) - mean(r)) * (d.states[0](c) - mean(c));
  }
  cov = cov / 10.0 + 1e-8 * Eigen::Matrix3d::Identity();
  const GaussianState g = initial_state_distribution(demos);
  EXPECT_LE((g.mean - mean).norm(), 1e-14);
  EXPECT_LE((g.cov - cov).norm(), 1e-14);
}

TEST(Rollout, IdentityDynamicsAreConstant) {
  const SkillModel model = scalar_model(4, 1.0, 0.0, 0.0);
  const GaussianState init{Eigen::VectorXd::Constant(1, 0.7), Eigen::MatrixXd::Constant(1, 1, 0.2)};
  for (const auto& m : rollout_moments(model, init)) {
    EXPECT_EQ(m.mean(0), 0.7);
    EXPECT_EQ(m.cov(0, 0), 0.2);
  }
}

TEST(Rollout, GeometricRecursion) {
  const SkillModel model = scalar_model(4, 0.5, 1.0, 0.0);
  const GaussianState init{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1)};
  const auto moments = rollout_moments(model, init);
  const double expected[] = {0.0, 1.0, 1.5, 1.75, 1.875};
  ASSERT_EQ(moments.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(moments[i].mean(0), expected[i]);
}

TEST(Rollout, RejectsDimensionMismatch) {
  std::mt19937_64 rng(33);
  const SkillModel model = testing::random_model(rng, 3, 2);
  EXPECT_THROW(rollout_moments(model, random_state(rng, 3)), Error);
}

TEST(Rollout, AddedNoiseNeverShrinksVariance) {
  std::mt19937_64 rng(34);
  const SkillModel model = testing::random_model(rng, 6, 3);
  SkillModel noisier = model;
  for (auto& s : noisier.steps) s.q += 0.05 * Eigen::MatrixXd::Identity(3, 3);
  const GaussianState init = random_state(rng, 3);
  const auto a = rollout_moments(model, init);
  const auto b = rollout_moments(noisier, init);
  for (std::size_t i = 0; i <= 6; ++i) {
    EXPECT_TRUE((b[i].cov.diagonal().array() >= a[i].cov.diagonal().array()).all());
  }
}

TEST(JointPrior, OneStepLagFormula) {
  std::mt19937_64 rng(35);
  const SkillModel model = testing::random_model(rng, 1, 2);
  const GaussianState init = random_state(rng, 2);
  const Eigen::MatrixXd k = build_joint_prior(model, init).dense_covariance();
  const Eigen::MatrixXd phi = model.steps[0].transition();
  EXPECT_LE((k.topLeftCorner(2, 2) - init.cov).norm(), 1e-14);
  EXPECT_LE((k.bottomLeftCorner(2, 2) - phi * init.cov).norm(), 1e-14);
  EXPECT_LE((k.topRightCorner(2, 2) - init.cov * phi.transpose()).norm(), 1e-14);
  EXPECT_LE((k.bottomRightCorner(2, 2) - (phi * init.cov * phi.transpose() + model.steps[0].q)).norm(),
            1e-14);
}

TEST(JointPrior, DiagonalBlocksMatchRollout) {
  std::mt19937_64 rng(36);
  const SkillModel model = testing::random_model(rng, 8, 3);
  const GaussianTrajectoryPrior prior(model, random_state(rng, 3));
  const Eigen::MatrixXd k = prior.dense_covariance();
  const auto moments = rollout_moments(model, prior.initial());
  for (std::size_t i = 0; i <= 8; ++i) {
    const Eigen::Index o = static_cast<Eigen::Index>(i) * 3;
    EXPECT_LE((k.block(o, o, 3, 3) - moments[i].cov).norm(), 1e-10);
    EXPECT_LE((prior.mean().segment(o, 3) - moments[i].mean).norm(), 1e-12);
    EXPECT_LE((prior.marginals()[i].cov - moments[i].cov).norm(), 1e-10);
  }
}

TEST(JointPrior, DenseInverseIsBlockTridiagonal) {
  std::mt19937_64 rng(37);
  for (std::size_t n : {2u, 5u, 10u}) {
    const SkillModel model = testing::random_model(rng, n, 2);
    const GaussianTrajectoryPrior prior(model, random_state(rng, 2));
    const Eigen::MatrixXd k = prior.dense_covariance();
    const Eigen::MatrixXd inv = k.inverse();
    double off_band = 0.0;
    for (Eigen::Index r = 0; r < inv.rows(); ++r)
      for (Eigen::Index c = 0; c < inv.cols(); ++c)
        if (std::abs(block_of(r, 2) - block_of(c, 2)) > 1) off_band = std::max(off_band, std::abs(inv(r, c)));
    EXPECT_LE(off_band / inv.cwiseAbs().maxCoeff(), 1e-8) << "N " << n;
    // The stored precision is the inverse of the dense covariance.
    const Eigen::MatrixXd product = prior.precision().to_dense() * k;
    EXPECT_LE((product - Eigen::MatrixXd::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(JointPrior, MahalanobisMatchesDense) {
  std::mt19937_64 rng(38);
  const SkillModel model = testing::random_model(rng, 6, 2);
  const GaussianTrajectoryPrior prior(model, random_state(rng, 2));
  const Eigen::VectorXd x = testing::gaussian_matrix(rng, 14, 1).col(0);
  const Eigen::VectorXd e = x - prior.mean();
  const double dense = e.dot(prior.dense_covariance().ldlt().solve(e));
  // The precision carries a small jitter on Q that the dense path does not.
  EXPECT_NEAR(prior.mahalanobis_squared(x), dense, 1e-6 * dense);
  EXPECT_EQ(prior.mahalanobis_squared(prior.mean()), 0.0);
}

TEST(JointPrior, SingularNoiseIsJittered) {
  const SkillModel model = scalar_model(3, 1.0, 0.5, 0.0);
  const GaussianState init{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1)};
  const GaussianTrajectoryPrior prior(model, init);
  EXPECT_TRUE(std::isfinite(prior.mahalanobis_squared(Eigen::Vector4d(0.0, 0.5, 1.0, 1.5))));
  EXPECT_GT(prior.mahalanobis_squared(Eigen::Vector4d(0.0, 0.5, 1.0, 1.6)), 1e6);
}

TEST(JointPrior, DenseCovarianceLimited) {
  const SkillModel model = scalar_model(51, 1.0, 0.0, 0.1);
  const GaussianState init{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  EXPECT_THROW(GaussianTrajectoryPrior(model, init).dense_covariance(), Error);
}

TEST(Sampling, NoiselessSamplesFollowMean) {
  const SkillModel model = scalar_model(5, 0.9, 0.3, 0.0);
  const GaussianState init{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Zero(1, 1)};
  const GaussianTrajectoryPrior prior(model, init);
  for (const auto& s : sample_trajectories(prior, 5, 1)) {
    EXPECT_LE((s.stacked() - prior.mean()).norm(), 1e-14);
  }
}

TEST(Sampling, DeterministicPerSeed) {
  std::mt19937_64 rng(39);
  const GaussianTrajectoryPrior prior(testing::random_model(rng, 4, 2), random_state(rng, 2));
  const auto a = sample_trajectories(prior, 3, 42);
  const auto b = sample_trajectories(prior, 3, 42);
  const auto c = sample_trajectories(prior, 3, 43);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(a[k].stacked(), b[k].stacked());
    EXPECT_NE(a[k].stacked(), c[k].stacked());
  }
  EXPECT_THROW(sample_trajectories(prior, 0, 1), Error);
}

TEST(Sampling, MonteCarloMomentsWithinThreeStandardErrors) {
  std::mt19937_64 rng(40);
  const std::size_t n = 4;
  const Eigen::Index dim = 2;
  const GaussianTrajectoryPrior prior(testing::random_model(rng, n, dim), random_state(rng, dim));
  const std::size_t count = 100000;
  const auto samples = sample_trajectories(prior, count, 7);
  for (std::size_t i = 0; i <= n; ++i) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& s : samples) mean += s.states[i];
    mean /= static_cast<double>(count);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& s : samples) cov += (s.states[i] - mean) * (s.states[i] - mean).transpose();
    cov /= static_cast<double>(count - 1);
    const GaussianState& m = prior.marginals()[i];
    for (Eigen::Index r = 0; r < dim; ++r) {
      EXPECT_LE(std::abs(mean(r) - m.mean(r)), 3.0 * std::sqrt(m.cov(r, r) / count));
      for (Eigen::Index c = 0; c < dim; ++c) {
        const double se = std::sqrt((m.cov(r, r) * m.cov(c, c) + m.cov(r, c) * m.cov(r, c)) / count);
        EXPECT_LE(std::abs(cov(r, c) - m.cov(r, c)), 3.0 * se) << "node " << i;
      }
    }
  }
}

TEST(PsdSqrt, ReconstructsAndClipsNegatives) {
  std::mt19937_64 rng(41);
  const Eigen::MatrixXd a = testing::gaussian_matrix(rng, 4, 3);
  const Eigen::MatrixXd psd = a * a.transpose();
  const Eigen::MatrixXd s = psd_sqrt(psd);
  EXPECT_LE(relative_error(s * s.transpose(), psd), 1e-12);
  Eigen::Matrix2d indefinite;
  indefinite << 1.0, 0.0, 0.0, -1e-12;
  const Eigen::MatrixXd t = psd_sqrt(indefinite);
  EXPECT_TRUE(t.allFinite());
  EXPECT_NEAR((t * t.transpose())(1, 1), 0.0, 1e-15);
}

}  // namespace
}  // namespace iwsl
