#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace iwsl {

/// A recorded demonstration: strictly increasing timestamps (s) and one
/// P-dimensional position per row of `positions` (m).
struct RawDemo {
  std::vector<double> timestamps;
  Eigen::MatrixXd positions;  // samples x P

  std::size_t size() const { return timestamps.size(); }
  Eigen::Index dimension() const { return positions.cols(); }
  double duration() const { return timestamps.back() - timestamps.front(); }
};

/// States x_0..x_N on a uniform grid. Each state stacks positions then
/// velocities, so D = 2P.
struct StateTrajectory {
  double dt = 0.0;
  std::vector<Eigen::VectorXd> states;

  std::size_t intervals() const { return states.empty() ? 0 : states.size() - 1; }
  Eigen::Index dimension() const { return states.empty() ? 0 : states.front().size(); }

  // Stacked [x_0; x_1; ...; x_N].
  Eigen::VectorXd stacked() const;
  static StateTrajectory from_stacked(const Eigen::VectorXd& x, Eigen::Index dim,
                                      double dt);
};

/// K time-aligned trajectories sharing N and dt.
class DemoSet {
 public:
  explicit DemoSet(std::vector<StateTrajectory> demos);

  const std::vector<StateTrajectory>& demos() const { return demos_; }
  const StateTrajectory& operator[](std::size_t k) const { return demos_[k]; }
  std::size_t size() const { return demos_.size(); }
  std::size_t intervals() const { return demos_.front().intervals(); }
  Eigen::Index dimension() const { return demos_.front().dimension(); }
  double dt() const { return demos_.front().dt; }

 private:
  std::vector<StateTrajectory> demos_;
};

}  // namespace iwsl
