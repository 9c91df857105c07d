#pragma once

#include "iwsl/environment.hpp"
#include "iwsl/types.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace iwsl::scenarios {

/// Planar reaches from staggered starts to a shared goal. The upper half of
/// the demos follows the rim of a disc at a small standoff where the straight
/// path would hit it; the lower half stays clear of the disc.
struct Reaching {
  std::vector<RawDemo> demos;
  std::vector<bool> detoured;
  Environment env{2};
  Eigen::Vector2d goal;
  WeightParams params;
};
Reaching reaching();

/// Placing motions from a common resting start to targets along a line.
/// The first group was recorded with an obstacle in the way and lifts over
/// it; the second group was recorded in a clean scene.
struct Placing {
  std::vector<RawDemo> obstacle_demos;
  std::vector<RawDemo> clean_demos;
  Environment obstacle_env{2};
  WeightParams params;
};
Placing placing();

/// Minimum-jerk phase 10s^3 - 15s^4 + 6s^5 on [0, 1].
double min_jerk(double s);

/// Writes "t,x_1..x_P" rows.
void write_demo_csv(const std::filesystem::path& path, const RawDemo& demo);

/// Runs the CLI with the given argument string; returns its exit status.
int run_cli(const std::string& args);

/// Reads a whole file as bytes.
std::string slurp(const std::filesystem::path& path);

}  // namespace iwsl::scenarios
