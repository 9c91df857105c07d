#include "iwsl/svg.hpp"

#include "iwsl/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace iwsl::svg {
namespace {

std::string num(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << v;
  return out.str();
}

Eigen::Vector2d planar(const Eigen::VectorXd& x) { return {x(0), x.size() > 1 ? x(1) : 0.0}; }

constexpr std::array<const char*, 6> kPalette = {"#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#17becf", "#8c564b"};

}  // namespace

Canvas::Canvas(const Eigen::Vector2d& lower, const Eigen::Vector2d& upper, int width_px)
    : lower_(lower), upper_(upper), width_(width_px) {
  const Eigen::Vector2d span = (upper_ - lower_).cwiseMax(1e-9);
  scale_ = width_px / span.x();
  height_ = std::max(1, static_cast<int>(std::lround(span.y() * scale_)));
}

Eigen::Vector2d Canvas::map(const Eigen::Vector2d& p) const {
  return {(p.x() - lower_.x()) * scale_, (upper_.y() - p.y()) * scale_};
}

void Canvas::polyline(const std::vector<Eigen::Vector2d>& points, const std::string& stroke,
                      double stroke_px, double opacity) {
  std::string pts;
  for (const auto& p : points) {
    const Eigen::Vector2d q = map(p);
    pts += num(q.x()) + "," + num(q.y()) + " ";
  }
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_px) +
           "\" stroke-opacity=\"" + num(opacity) + "\" points=\"" + pts + "\"/>\n";
}

void Canvas::circle(const Eigen::Vector2d& center, double radius, const std::string& fill,
                    double opacity) {
  const Eigen::Vector2d c = map(center);
  body_ += "<circle cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) + "\" r=\"" +
           num(radius * scale_) + "\" fill=\"" + fill + "\" fill-opacity=\"" + num(opacity) +
           "\"/>\n";
}

void Canvas::ellipse(const Eigen::Vector2d& center, const Eigen::Vector2d& radii,
                     const std::string& fill, double opacity) {
  const Eigen::Vector2d c = map(center);
  body_ += "<ellipse cx=\"" + num(c.x()) + "\" cy=\"" + num(c.y()) + "\" rx=\"" +
           num(radii.x() * scale_) + "\" ry=\"" + num(radii.y() * scale_) + "\" fill=\"" + fill +
           "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
}

void Canvas::rect(const Eigen::Vector2d& lower, const Eigen::Vector2d& upper,
                  const std::string& fill, double opacity) {
  const Eigen::Vector2d a = map({lower.x(), upper.y()});
  body_ += "<rect x=\"" + num(a.x()) + "\" y=\"" + num(a.y()) + "\" width=\"" +
           num((upper.x() - lower.x()) * scale_) + "\" height=\"" +
           num((upper.y() - lower.y()) * scale_) + "\" fill=\"" + fill + "\" fill-opacity=\"" +
           num(opacity) + "\"/>\n";
}

std::string Canvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width_) +
         "\" height=\"" + std::to_string(height_) + "\" viewBox=\"0 0 " + std::to_string(width_) +
         " " + std::to_string(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

std::string render(const GaussianTrajectoryPrior& prior, const Environment* env,
                   const std::vector<StateTrajectory>& paths,
                   const std::vector<StateTrajectory>& faint_paths) {
  const auto& marginals = prior.marginals();
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  auto grow = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& pad) {
    lo = lo.cwiseMin(p - pad);
    hi = hi.cwiseMax(p + pad);
  };

  std::vector<Eigen::Vector2d> mean_path;
  std::vector<Eigen::Vector2d> sigmas;
  for (const auto& m : marginals) {
    const Eigen::Vector2d sd(std::sqrt(std::max(0.0, m.cov(0, 0))),
                             m.cov.rows() > 1 ? std::sqrt(std::max(0.0, m.cov(1, 1))) : 0.0);
    mean_path.push_back(planar(m.mean));
    sigmas.push_back(sd);
    grow(mean_path.back(), sd);
  }
  for (const auto* set : {&paths, &faint_paths}) {
    for (const auto& traj : *set) {
      for (const auto& x : traj.states) grow(planar(x), Eigen::Vector2d::Zero());
    }
  }
  if (env != nullptr && !env->obstacles().empty()) {
    const auto [olo, ohi] = env->obstacle_bounds();
    grow(planar(olo), Eigen::Vector2d::Zero());
    grow(planar(ohi), Eigen::Vector2d::Zero());
  }
  const Eigen::Vector2d margin = 0.05 * (hi - lo).cwiseMax(1e-3) + Eigen::Vector2d::Constant(1e-3);

  Canvas canvas(lo - margin, hi + margin);
  for (std::size_t i = 0; i < mean_path.size(); ++i) {
    canvas.ellipse(mean_path[i], sigmas[i].cwiseMax(1e-6), "#1f77b4", 0.08);
  }
  if (env != nullptr) {
    for (const auto& o : env->obstacles()) {
      if (const auto* s = std::get_if<Sphere>(&o)) {
        canvas.circle(planar(s->center), s->radius, "#444444", 0.6);
      } else {
        const auto& b = std::get<Box>(o);
        canvas.rect(planar(b.min), planar(b.max), "#444444", 0.6);
      }
    }
  }
  for (const auto& traj : faint_paths) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& x : traj.states) pts.push_back(planar(x));
    canvas.polyline(pts, "#7f7f7f", 1.0, 0.5);
  }
  canvas.polyline(mean_path, "#1f77b4", 2.5);
  for (std::size_t k = 0; k < paths.size(); ++k) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& x : paths[k].states) pts.push_back(planar(x));
    canvas.polyline(pts, kPalette[k % kPalette.size()], 2.0);
  }
  return canvas.str();
}

}  // namespace iwsl::svg
