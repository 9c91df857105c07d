#pragma once

#include "iwsl/environment.hpp"
#include "iwsl/incremental_learning.hpp"
#include "iwsl/prior.hpp"
#include "iwsl/reproduction.hpp"
#include "iwsl/skill_model.hpp"
#include "iwsl/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace iwsl::io {

using nlohmann::json;

// Matrices are row-major nested arrays.
json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);
json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const json& j);

/// Reads and parses a JSON file; failures become kIo / kParse with the path.
json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);

/// Writes via a sibling temporary file and a rename.
void atomic_write(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& j);

// Raw demos: {"timestamps": [...], "positions": [[...], ...]} or CSV with
// time in column 0 and positions after it.
RawDemo raw_demo_from_json(const json& j);
json raw_demo_to_json(const RawDemo& demo);
RawDemo raw_demo_from_csv(const std::string& text);
RawDemo read_raw_demo(const std::filesystem::path& path);

// {"dimension": 2|3, "obstacles": [{"type": "sphere", ...}, {"type": "box", ...}]}
Environment environment_from_json(const json& j);
json environment_to_json(const Environment& env);
Environment read_environment(const std::filesystem::path& path);

// {"dt": ..., "D": ..., "steps": [{"Phi_tilde": [[...]], "Q": [[...]]}, ...]}
json skill_model_to_json(const SkillModel& model);
SkillModel skill_model_from_json(const json& j);

json gaussian_state_to_json(const GaussianState& state);
GaussianState gaussian_state_from_json(const json& j);

// Per-interval M, R, V, nu plus alpha, beta, demos_seen and dt.
json checkpoint_to_json(const IncrementalLearner& learner);
IncrementalLearner learner_from_checkpoint(const json& j);

json state_trajectory_to_json(const StateTrajectory& traj);
StateTrajectory state_trajectory_from_json(const json& j);

/// Rows "t, mean_1..mean_D, std_1..std_D".
std::string prior_csv(const GaussianTrajectoryPrior& prior);
/// Rows "t, x_1..x_D".
std::string trajectory_csv(const StateTrajectory& traj);
/// Rows "demo, node, weight".
std::string weights_csv(const std::vector<Eigen::VectorXd>& weights);
json solution_summary(const Solution& solution);

}  // namespace iwsl::io
