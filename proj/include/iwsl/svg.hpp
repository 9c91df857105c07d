#pragma once

#include "iwsl/environment.hpp"
#include "iwsl/prior.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace iwsl::svg {

/// Minimal SVG canvas in world coordinates (y up).
class Canvas {
 public:
  Canvas(const Eigen::Vector2d& lower, const Eigen::Vector2d& upper, int width_px = 640);

  void polyline(const std::vector<Eigen::Vector2d>& points, const std::string& stroke,
                double stroke_px = 2.0, double opacity = 1.0);
  void circle(const Eigen::Vector2d& center, double radius, const std::string& fill,
              double opacity = 1.0);
  void ellipse(const Eigen::Vector2d& center, const Eigen::Vector2d& radii,
               const std::string& fill, double opacity);
  void rect(const Eigen::Vector2d& lower, const Eigen::Vector2d& upper, const std::string& fill,
            double opacity = 1.0);

  std::string str() const;

 private:
  Eigen::Vector2d map(const Eigen::Vector2d& p) const;

  Eigen::Vector2d lower_;
  Eigen::Vector2d upper_;
  double scale_;
  int width_;
  int height_;
  std::string body_;
};

/// Scene overlay in the first two position axes: prior mean with a 1-sigma
/// band, obstacles, and any number of paths (e.g. demos or solutions).
std::string render(const GaussianTrajectoryPrior& prior, const Environment* env,
                   const std::vector<StateTrajectory>& paths,
                   const std::vector<StateTrajectory>& faint_paths = {});

}  // namespace iwsl::svg
