#pragma once

#include "iwsl/spline.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace iwsl {

/// Checks the RawDemo invariants, throwing kInvalidArgument on violation.
void validate(const RawDemo& demo);

/// Samples the demo's spline at N+1 uniform times spanning the recording.
/// States are positions followed by spline velocities; dt = duration / N.
StateTrajectory estimate_states(const RawDemo& demo, std::size_t intervals);

struct DtwResult {
  double cost = 0.0;
  // Monotone index pairs (i into a, j into b), from (0,0) to (n-1,m-1).
  std::vector<std::pair<std::size_t, std::size_t>> path;
};

/// Classical DTW with Euclidean point cost and steps (1,0), (0,1), (1,1).
/// Rows of `a` and `b` are points of equal dimension.
DtwResult dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Warps every demo onto the time axis of demos[reference]. Samples of a demo
/// matched to the same reference sample are averaged, so each output has the
/// reference's timestamps. Defaults to the longest demo as reference.
std::vector<RawDemo> dtw_align(const std::vector<RawDemo>& demos,
                               std::optional<std::size_t> reference = std::nullopt);

/// Index of the demo with the most samples; ties go to the lowest index.
std::size_t longest_demo(const std::vector<RawDemo>& demos);

/// Full preprocessing: optional DTW alignment, then spline state estimation.
DemoSet prepare_demos(const std::vector<RawDemo>& demos, std::size_t intervals,
                      bool align = true,
                      std::optional<std::size_t> reference = std::nullopt);

}  // namespace iwsl
