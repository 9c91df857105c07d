#pragma once

#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <utility>
#include <variant>
#include <vector>

namespace iwsl {

/// Distance reported when a scene has no obstacles.
inline constexpr double kNoObstacleDistance = 1e6;

struct Sphere {
  Eigen::VectorXd center;
  double radius = 0.0;
};

struct Box {
  Eigen::VectorXd min;
  Eigen::VectorXd max;
};

using Obstacle = std::variant<Sphere, Box>;

/// Exact signed distance to one primitive: negative inside, positive outside.
double signed_distance(const Obstacle& obstacle, const Eigen::VectorXd& p);

/// Anything that can answer workspace signed-distance queries.
class DistanceSource {
 public:
  virtual ~DistanceSource() = default;
  virtual int dimension() const = 0;
  virtual double distance(const Eigen::VectorXd& p) const = 0;
};

class Environment : public DistanceSource {
 public:
  /// Validates every obstacle against `dimension` (2 or 3).
  Environment(int dimension, std::vector<Obstacle> obstacles = {});

  int dimension() const override { return dimension_; }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }

  /// Minimum over obstacles, or kNoObstacleDistance for an empty scene.
  double distance(const Eigen::VectorXd& p) const override;

  /// Axis-aligned bounds of all obstacles; empty pair for an empty scene.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> obstacle_bounds() const;

 private:
  int dimension_;
  std::vector<Obstacle> obstacles_;
};

inline double signed_distance(const Environment& env, const Eigen::VectorXd& p) {
  return env.distance(p);
}

/// Dense grid of signed distances with multilinear interpolation between
/// nodes. Queries outside the grid throw kOutOfBounds.
class SignedDistanceField : public DistanceSource {
 public:
  /// Samples `env` on a grid covering [lower, upper] at the given spacing.
  static SignedDistanceField build(const Environment& env, const Eigen::VectorXd& lower,
                                   const Eigen::VectorXd& upper, double resolution);

  int dimension() const override { return static_cast<int>(origin_.size()); }
  double distance(const Eigen::VectorXd& p) const override;

  /// Exact gradient of the interpolant inside the containing cell.
  Eigen::VectorXd gradient(const Eigen::VectorXd& p) const;

  const Eigen::VectorXd& origin() const { return origin_; }
  Eigen::VectorXd upper() const;
  double resolution() const { return resolution_; }
  const Eigen::VectorXi& counts() const { return counts_; }
  double node_value(const Eigen::VectorXi& index) const;
  Eigen::VectorXd node_position(const Eigen::VectorXi& index) const;
  bool contains(const Eigen::VectorXd& p) const;

 private:
  struct Cell {
    Eigen::VectorXi base;
    Eigen::VectorXd frac;
  };
  Cell locate(const Eigen::VectorXd& p) const;
  Eigen::Index flat(const Eigen::VectorXi& index) const;

  Eigen::VectorXd origin_;
  double resolution_ = 0.0;
  Eigen::VectorXi counts_;
  std::vector<double> values_;
};

/// Hinge and weight parameters: the danger-area width and weight decay.
struct WeightParams {
  double epsilon = 0.3;
  double sigma_obs = 0.01;
};

void validate(const WeightParams& params);

/// c(d) = eps - d inside the danger area, 0 beyond it.
double hinge_cost(double distance, double epsilon);
inline double hinge_cost(double distance, const WeightParams& params) {
  return hinge_cost(distance, params.epsilon);
}

/// w = exp(-c^2 / (2 sigma_obs^2)) for a given signed distance.
double importance_weight(double distance, const WeightParams& params);

/// Weight of a state, using only its leading position components.
double importance_weight(const Eigen::VectorXd& state, const DistanceSource& scene,
                         const WeightParams& params);

/// Per-node weights w(x_0)..w(x_N).
Eigen::VectorXd weight_trajectory(const StateTrajectory& traj, const DistanceSource& scene,
                                  const WeightParams& params);

}  // namespace iwsl
