#pragma once

#include "iwsl/environment.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iwsl::cli {

namespace fs = std::filesystem;

/// Everything a pipeline run needs. Relative paths in the config file are
/// resolved against the config file's directory.
struct PipelineConfig {
  std::vector<fs::path> demos;
  std::optional<fs::path> environment;  // learning scene
  std::size_t grid_n = 50;
  bool align = true;
  std::optional<std::size_t> reference_index;
  WeightParams weights;
  bool weighting = true;
  std::optional<double> lambda;
  double q_min = 1e-6;
  double alpha = 1e10;
  double beta = 1e10;
  std::size_t rollout_samples = 20;
  nlohmann::json reproduction = nlohmann::json::object();
  fs::path base_dir = ".";
  fs::path out = "out";
  std::uint64_t seed = 0;
};

PipelineConfig load_config(const fs::path& path);

struct AssimilateArgs {
  std::optional<fs::path> checkpoint;
  std::optional<fs::path> demo;
  std::optional<fs::path> environment;
  std::optional<long> state_dim;
};

struct ModelArgs {
  std::optional<fs::path> model;
  std::optional<fs::path> init;
};

/// Process exit codes.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3, kNotConverged = 4 };

int cmd_ingest(const PipelineConfig& config);
int cmd_weights(const PipelineConfig& config);
int cmd_learn(const PipelineConfig& config);
int cmd_assimilate(const PipelineConfig& config, const AssimilateArgs& args);
int cmd_rollout(const PipelineConfig& config, const ModelArgs& args);
int cmd_reproduce(const PipelineConfig& config, const ModelArgs& args);

}  // namespace iwsl::cli
