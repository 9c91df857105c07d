#include "iwsl/types.hpp"

#include "iwsl/error.hpp"

#include <cmath>
#include <string>

namespace iwsl {

Eigen::VectorXd StateTrajectory::stacked() const {
  const Eigen::Index d = dimension();
  Eigen::VectorXd x(d * static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    x.segment(static_cast<Eigen::Index>(i) * d, d) = states[i];
  }
  return x;
}

StateTrajectory StateTrajectory::from_stacked(const Eigen::VectorXd& x, Eigen::Index dim,
                                              double dt) {
  if (dim <= 0 || x.size() % dim != 0) {
    fail(ErrorCode::kDimensionMismatch, "stacked trajectory size is not a multiple of D");
  }
  StateTrajectory traj;
  traj.dt = dt;
  for (Eigen::Index i = 0; i < x.size() / dim; ++i) {
    traj.states.emplace_back(x.segment(i * dim, dim));
  }
  return traj;
}

DemoSet::DemoSet(std::vector<StateTrajectory> demos) : demos_(std::move(demos)) {
  if (demos_.empty()) fail(ErrorCode::kInvalidArgument, "demo set is empty");
  const auto& first = demos_.front();
  if (first.intervals() < 1) fail(ErrorCode::kInvalidArgument, "trajectory needs N >= 1");
  if (!(first.dt > 0.0)) fail(ErrorCode::kInvalidArgument, "trajectory needs dt > 0");
  for (std::size_t k = 0; k < demos_.size(); ++k) {
    const auto& demo = demos_[k];
    if (demo.intervals() != first.intervals()) {
      fail(ErrorCode::kGridMismatch, "demo " + std::to_string(k) + " has a different N");
    }
    if (std::abs(demo.dt - first.dt) > 1e-9 * first.dt) {
      fail(ErrorCode::kGridMismatch, "demo " + std::to_string(k) + " has a different dt");
    }
    for (const auto& x : demo.states) {
      if (x.size() != first.dimension()) {
        fail(ErrorCode::kDimensionMismatch,
             "demo " + std::to_string(k) + " has a state of the wrong dimension");
      }
    }
  }
}

}  // namespace iwsl
