#include "iwsl/demonstrations.hpp"

#include "iwsl/error.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace iwsl {

void validate(const RawDemo& demo) {
  if (demo.size() < 4) {
    fail(ErrorCode::kInvalidArgument,
         "too few samples: a cubic spline needs at least 4, got " + std::to_string(demo.size()));
  }
  if (static_cast<std::size_t>(demo.positions.rows()) != demo.size()) {
    fail(ErrorCode::kDimensionMismatch, "timestamp and position counts differ");
  }
  if (demo.positions.cols() < 1) {
    fail(ErrorCode::kDimensionMismatch, "positions have zero dimension");
  }
  for (std::size_t i = 1; i < demo.size(); ++i) {
    if (!(demo.timestamps[i] > demo.timestamps[i - 1])) {
      fail(ErrorCode::kInvalidArgument,
           "non-increasing timestamps at sample " + std::to_string(i));
    }
  }
}

StateTrajectory estimate_states(const RawDemo& demo, std::size_t intervals) {
  if (intervals < 1) fail(ErrorCode::kInvalidArgument, "N must be at least 1");
  const CubicSpline spline = CubicSpline::fit(demo);

  const Eigen::Index p = spline.dimension();
  const double t0 = spline.t_first();
  const double span = spline.t_last() - t0;

  StateTrajectory traj;
  traj.dt = span / static_cast<double>(intervals);
  traj.states.reserve(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    // j/N is exact for equal ratios, so grids at N and 2N share nodes bitwise.
    const double t = i == intervals ? spline.t_last()
                                    : t0 + span * (static_cast<double>(i) /
                                                   static_cast<double>(intervals));
    Eigen::VectorXd x(2 * p);
    x.head(p) = spline.value(t);
    x.tail(p) = spline.derivative(t);
    traj.states.push_back(std::move(x));
  }
  return traj;
}

DtwResult dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() == 0 || b.rows() == 0) fail(ErrorCode::kInvalidArgument, "DTW of an empty sequence");
  if (a.cols() != b.cols()) fail(ErrorCode::kDimensionMismatch, "DTW sequences differ in dimension");

  const Eigen::Index n = a.rows();
  const Eigen::Index m = b.rows();
  constexpr double kInf = std::numeric_limits<double>::infinity();

  Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(n, m, kInf);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = (a.row(i) - b.row(j)).norm();
      if (i == 0 && j == 0) {
        acc(i, j) = d;
        continue;
      }
      double best = kInf;
      if (i > 0 && j > 0) best = acc(i - 1, j - 1);
      if (i > 0) best = std::min(best, acc(i - 1, j));
      if (j > 0) best = std::min(best, acc(i, j - 1));
      acc(i, j) = d + best;
    }
  }

  DtwResult result;
  result.cost = acc(n - 1, m - 1);
  Eigen::Index i = n - 1;
  Eigen::Index j = m - 1;
  result.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    if (i == 0) {
      --j;
    } else if (j == 0) {
      --i;
    } else {
      // Diagonal wins ties.
      const double diag = acc(i - 1, j - 1);
      const double up = acc(i - 1, j);
      const double left = acc(i, j - 1);
      if (diag <= up && diag <= left) {
        --i;
        --j;
      } else if (up <= left) {
        --i;
      } else {
        --j;
      }
    }
    result.path.emplace_back(i, j);
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

std::size_t longest_demo(const std::vector<RawDemo>& demos) {
  if (demos.empty()) fail(ErrorCode::kInvalidArgument, "empty demo set");
  std::size_t best = 0;
  for (std::size_t k = 1; k < demos.size(); ++k) {
    if (demos[k].size() > demos[best].size()) best = k;
  }
  return best;
}

std::vector<RawDemo> dtw_align(const std::vector<RawDemo>& demos,
                               std::optional<std::size_t> reference) {
  if (demos.empty()) fail(ErrorCode::kInvalidArgument, "empty demo set");
  const std::size_t ref = reference.value_or(longest_demo(demos));
  if (ref >= demos.size()) fail(ErrorCode::kInvalidArgument, "reference index out of range");

  const RawDemo& base = demos[ref];
  for (std::size_t k = 0; k < demos.size(); ++k) {
    if (demos[k].size() == 0) fail(ErrorCode::kInvalidArgument, "demo " + std::to_string(k) + " is empty");
    if (demos[k].dimension() != base.dimension()) {
      fail(ErrorCode::kDimensionMismatch,
           "demo " + std::to_string(k) + " has dimension " +
               std::to_string(demos[k].dimension()) + ", reference has " +
               std::to_string(base.dimension()));
    }
  }

  std::vector<RawDemo> aligned;
  aligned.reserve(demos.size());
  for (const RawDemo& demo : demos) {
    const DtwResult match = dtw(base.positions, demo.positions);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(base.positions.rows(), base.positions.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(base.positions.rows());
    for (const auto& [i, j] : match.path) {
      sum.row(static_cast<Eigen::Index>(i)) += demo.positions.row(static_cast<Eigen::Index>(j));
      count(static_cast<Eigen::Index>(i)) += 1.0;
    }
    RawDemo out;
    out.timestamps = base.timestamps;
    out.positions = sum.array().colwise() / count.array();
    aligned.push_back(std::move(out));
  }
  return aligned;
}

DemoSet prepare_demos(const std::vector<RawDemo>& demos, std::size_t intervals, bool align,
                      std::optional<std::size_t> reference) {
  if (demos.empty()) fail(ErrorCode::kInvalidArgument, "empty demo set");
  const std::vector<RawDemo> source = align ? dtw_align(demos, reference) : demos;
  std::vector<StateTrajectory> states;
  states.reserve(source.size());
  for (const RawDemo& demo : source) states.push_back(estimate_states(demo, intervals));
  return DemoSet(std::move(states));
}

}  // namespace iwsl
