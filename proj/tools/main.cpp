#include "pipeline.hpp"

#include "iwsl/error.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace iwsl::cli;

  CLI::App app{"Importance-weighted skill learning and reproduction"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool no_weighting = false;
  app.add_option("--config", config_path, "Pipeline config JSON");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--out", out, "Output directory");
  app.add_flag("--no-weighting", no_weighting, "Use unit importance weights");

  auto* ingest = app.add_subcommand("ingest", "Align demos and estimate states");
  auto* weights = app.add_subcommand("weights", "Compute per-node importance weights");
  auto* learn = app.add_subcommand("learn", "Batch-learn the skill model");
  auto* assimilate = app.add_subcommand("assimilate", "Add one demo to an incremental checkpoint");
  auto* rollout = app.add_subcommand("rollout", "Roll out the trajectory prior");
  auto* reproduce = app.add_subcommand("reproduce", "Solve for MAP reproductions");

  AssimilateArgs assimilate_args;
  std::string checkpoint, demo, environment;
  long state_dim = 0;
  assimilate->add_option("--checkpoint", checkpoint, "Checkpoint JSON (created if missing)");
  assimilate->add_option("--demo", demo, "Raw demo file to assimilate");
  assimilate->add_option("--environment", environment, "Scene the demo was recorded in");
  assimilate->add_option("--state-dim", state_dim, "State dimension for an empty checkpoint");

  ModelArgs model_args;
  std::string model, init;
  for (auto* sub : {rollout, reproduce}) {
    sub->add_option("--model", model, "Skill model JSON");
    sub->add_option("--init", init, "Initial state Gaussian JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    PipelineConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (seed) config.seed = *seed;
    if (out) config.out = *out;
    if (no_weighting) config.weighting = false;

    if (!checkpoint.empty()) assimilate_args.checkpoint = checkpoint;
    if (!demo.empty()) assimilate_args.demo = demo;
    if (!environment.empty()) assimilate_args.environment = environment;
    if (state_dim > 0) assimilate_args.state_dim = state_dim;
    if (!model.empty()) model_args.model = model;
    if (!init.empty()) model_args.init = init;

    if (*ingest) return cmd_ingest(config);
    if (*weights) return cmd_weights(config);
    if (*learn) return cmd_learn(config);
    if (*assimilate) return cmd_assimilate(config, assimilate_args);
    if (*rollout) return cmd_rollout(config, model_args);
    if (*reproduce) return cmd_reproduce(config, model_args);
  } catch (const iwsl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.numerical() ? kNumericalFailure : kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}
