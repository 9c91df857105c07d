#include "iwsl/environment.hpp"

#include "iwsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iwsl {
namespace {

struct PrimitiveDistance {
  const Eigen::VectorXd& p;

  double operator()(const Sphere& s) const { return (p - s.center).norm() - s.radius; }

  double operator()(const Box& b) const {
    const Eigen::ArrayXd center = 0.5 * (b.min + b.max).array();
    const Eigen::ArrayXd half = 0.5 * (b.max - b.min).array();
    const Eigen::ArrayXd q = (p.array() - center).abs() - half;
    const double outside = q.max(0.0).matrix().norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
  }
};

Eigen::Index obstacle_dimension(const Obstacle& obstacle) {
  return std::visit(
      [](const auto& o) -> Eigen::Index {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return o.center.size();
        } else {
          return o.min.size();
        }
      },
      obstacle);
}

}  // namespace

double signed_distance(const Obstacle& obstacle, const Eigen::VectorXd& p) {
  if (obstacle_dimension(obstacle) != p.size()) {
    fail(ErrorCode::kDimensionMismatch, "query point does not match obstacle dimension");
  }
  return std::visit(PrimitiveDistance{p}, obstacle);
}

Environment::Environment(int dimension, std::vector<Obstacle> obstacles)
    : dimension_(dimension), obstacles_(std::move(obstacles)) {
  if (dimension_ != 2 && dimension_ != 3) {
    fail(ErrorCode::kInvalidArgument, "environment dimension must be 2 or 3");
  }
  for (std::size_t k = 0; k < obstacles_.size(); ++k) {
    const std::string tag = "obstacle " + std::to_string(k);
    if (obstacle_dimension(obstacles_[k]) != dimension_) {
      fail(ErrorCode::kDimensionMismatch, tag + " does not match environment dimension");
    }
    if (const auto* s = std::get_if<Sphere>(&obstacles_[k]); s && !(s->radius > 0.0)) {
      fail(ErrorCode::kInvalidArgument, tag + ": sphere radius must be positive");
    }
    if (const auto* b = std::get_if<Box>(&obstacles_[k]);
        b && (b->max.size() != b->min.size() || !(b->min.array() < b->max.array()).all())) {
      fail(ErrorCode::kInvalidArgument, tag + ": box min must be below max in every axis");
    }
  }
}

double Environment::distance(const Eigen::VectorXd& p) const {
  if (p.size() != dimension_) {
    fail(ErrorCode::kDimensionMismatch, "query point of dimension " + std::to_string(p.size()) +
                                            " in a " + std::to_string(dimension_) +
                                            "-D environment");
  }
  double best = kNoObstacleDistance;
  for (const auto& obstacle : obstacles_) {
    best = std::min(best, std::visit(PrimitiveDistance{p}, obstacle));
  }
  return best;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> Environment::obstacle_bounds() const {
  if (obstacles_.empty()) return {};
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(dimension_, std::numeric_limits<double>::infinity());
  Eigen::VectorXd hi = -lo;
  for (const auto& obstacle : obstacles_) {
    if (const auto* s = std::get_if<Sphere>(&obstacle)) {
      lo = lo.cwiseMin((s->center.array() - s->radius).matrix());
      hi = hi.cwiseMax((s->center.array() + s->radius).matrix());
    } else {
      const auto& b = std::get<Box>(obstacle);
      lo = lo.cwiseMin(b.min);
      hi = hi.cwiseMax(b.max);
    }
  }
  return {lo, hi};
}

SignedDistanceField SignedDistanceField::build(const Environment& env,
                                               const Eigen::VectorXd& lower,
                                               const Eigen::VectorXd& upper,
                                               double resolution) {
  if (!(resolution > 0.0)) fail(ErrorCode::kInvalidArgument, "SDF resolution must be positive");
  if (lower.size() != env.dimension() || upper.size() != env.dimension()) {
    fail(ErrorCode::kDimensionMismatch, "SDF bounds do not match environment dimension");
  }
  if (!(lower.array() < upper.array()).all()) {
    fail(ErrorCode::kInvalidArgument, "degenerate SDF bounds");
  }

  SignedDistanceField field;
  field.origin_ = lower;
  field.resolution_ = resolution;
  field.counts_.resize(lower.size());
  double total = 1.0;
  for (Eigen::Index a = 0; a < lower.size(); ++a) {
    const double cells = std::ceil((upper(a) - lower(a)) / resolution - 1e-9);
    field.counts_(a) = static_cast<int>(std::max(1.0, cells)) + 1;
    total *= field.counts_(a);
  }
  if (total > 5e8) fail(ErrorCode::kInvalidArgument, "SDF grid too large; raise the resolution");

  field.values_.resize(static_cast<std::size_t>(total));
  Eigen::VectorXi index = Eigen::VectorXi::Zero(lower.size());
  for (std::size_t n = 0; n < field.values_.size(); ++n) {
    field.values_[n] = env.distance(field.node_position(index));
    for (Eigen::Index a = 0; a < index.size(); ++a) {
      if (++index(a) < field.counts_(a)) break;
      index(a) = 0;
    }
  }
  return field;
}

Eigen::VectorXd SignedDistanceField::upper() const {
  return origin_ + resolution_ * (counts_.array() - 1).cast<double>().matrix();
}

Eigen::Index SignedDistanceField::flat(const Eigen::VectorXi& index) const {
  Eigen::Index n = 0;
  for (Eigen::Index a = index.size() - 1; a >= 0; --a) n = n * counts_(a) + index(a);
  return n;
}

double SignedDistanceField::node_value(const Eigen::VectorXi& index) const {
  return values_[static_cast<std::size_t>(flat(index))];
}

Eigen::VectorXd SignedDistanceField::node_position(const Eigen::VectorXi& index) const {
  return origin_ + resolution_ * index.cast<double>();
}

bool SignedDistanceField::contains(const Eigen::VectorXd& p) const {
  if (p.size() != origin_.size()) return false;
  const Eigen::ArrayXd u = (p - origin_).array() / resolution_;
  const double slack = 1e-9;
  return (u >= -slack).all() && (u <= (counts_.array() - 1).cast<double>() + slack).all();
}

SignedDistanceField::Cell SignedDistanceField::locate(const Eigen::VectorXd& p) const {
  if (p.size() != origin_.size()) {
    fail(ErrorCode::kDimensionMismatch, "SDF query point has the wrong dimension");
  }
  if (!contains(p)) fail(ErrorCode::kOutOfBounds, "SDF query outside the grid bounds");
  Cell cell{Eigen::VectorXi(p.size()), Eigen::VectorXd(p.size())};
  for (Eigen::Index a = 0; a < p.size(); ++a) {
    const double u = std::clamp((p(a) - origin_(a)) / resolution_, 0.0,
                                static_cast<double>(counts_(a) - 1));
    const int base = std::min(static_cast<int>(std::floor(u)), counts_(a) - 2);
    cell.base(a) = base;
    cell.frac(a) = u - base;
  }
  return cell;
}

double SignedDistanceField::distance(const Eigen::VectorXd& p) const {
  const Cell cell = locate(p);
  const auto dim = static_cast<int>(p.size());
  double value = 0.0;
  Eigen::VectorXi corner(dim);
  for (int mask = 0; mask < (1 << dim); ++mask) {
    double weight = 1.0;
    for (int a = 0; a < dim; ++a) {
      const bool high = (mask >> a) & 1;
      corner(a) = cell.base(a) + (high ? 1 : 0);
      weight *= high ? cell.frac(a) : 1.0 - cell.frac(a);
    }
    value += weight * node_value(corner);
  }
  return value;
}

Eigen::VectorXd SignedDistanceField::gradient(const Eigen::VectorXd& p) const {
  const Cell cell = locate(p);
  const auto dim = static_cast<int>(p.size());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXi corner(dim);
  for (int mask = 0; mask < (1 << dim); ++mask) {
    for (int a = 0; a < dim; ++a) corner(a) = cell.base(a) + ((mask >> a) & 1);
    const double v = node_value(corner);
    for (int a = 0; a < dim; ++a) {
      double weight = ((mask >> a) & 1) ? 1.0 : -1.0;
      for (int b = 0; b < dim; ++b) {
        if (b == a) continue;
        weight *= ((mask >> b) & 1) ? cell.frac(b) : 1.0 - cell.frac(b);
      }
      grad(a) += weight * v;
    }
  }
  return grad / resolution_;
}

void validate(const WeightParams& params) {
  if (!(params.epsilon >= 0.0)) fail(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  if (!(params.sigma_obs > 0.0)) fail(ErrorCode::kInvalidArgument, "sigma_obs must be > 0");
}

double hinge_cost(double distance, double epsilon) {
  return distance <= epsilon ? epsilon - distance : 0.0;
}

double importance_weight(double distance, const WeightParams& params) {
  const double c = hinge_cost(distance, params);
  // Floored so deep penetrations still give a strictly positive weight.
  return std::max(std::exp(-c * c / (2.0 * params.sigma_obs * params.sigma_obs)),
                  std::numeric_limits<double>::min());
}

double importance_weight(const Eigen::VectorXd& state, const DistanceSource& scene,
                         const WeightParams& params) {
  const int p = scene.dimension();
  if (state.size() < p) {
    fail(ErrorCode::kDimensionMismatch, "state has fewer components than the scene dimension");
  }
  return importance_weight(scene.distance(state.head(p)), params);
}

Eigen::VectorXd weight_trajectory(const StateTrajectory& traj, const DistanceSource& scene,
                                  const WeightParams& params) {
  validate(params);
  Eigen::VectorXd w(static_cast<Eigen::Index>(traj.states.size()));
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    w(static_cast<Eigen::Index>(i)) = importance_weight(traj.states[i], scene, params);
  }
  return w;
}

}  // namespace iwsl
