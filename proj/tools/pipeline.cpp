#include "pipeline.hpp"

#include "iwsl/batch_learning.hpp"
#include "iwsl/demonstrations.hpp"
#include "iwsl/error.hpp"
#include "iwsl/incremental_learning.hpp"
#include "iwsl/io.hpp"
#include "iwsl/prior.hpp"
#include "iwsl/reproduction.hpp"
#include "iwsl/svg.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace iwsl::cli {
namespace {

using nlohmann::json;

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

void log(const std::string& line) { std::cerr << line << "\n"; }

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

DemoSet load_demo_set(const PipelineConfig& config) {
  if (config.demos.empty()) fail(ErrorCode::kInvalidArgument, "config lists no demonstrations");
  std::vector<RawDemo> raw;
  raw.reserve(config.demos.size());
  for (const auto& path : config.demos) raw.push_back(io::read_raw_demo(path));
  return prepare_demos(raw, config.grid_n, config.align, config.reference_index);
}

std::optional<Environment> load_environment(const std::optional<fs::path>& path) {
  if (!path) return std::nullopt;
  return io::read_environment(*path);
}

std::vector<Eigen::VectorXd> demo_weights(const PipelineConfig& config, const DemoSet& demos) {
  const auto env = config.weighting ? load_environment(config.environment) : std::nullopt;
  if (!env) return unit_weights(demos);
  std::vector<Eigen::VectorXd> weights;
  for (const auto& demo : demos.demos()) {
    weights.push_back(weight_trajectory(demo, *env, config.weights));
  }
  return weights;
}

void report_weights(const std::vector<Eigen::VectorXd>& weights) {
  for (std::size_t k = 0; k < weights.size(); ++k) {
    log("demo " + std::to_string(k) + ": min weight " + fmt(weights[k].minCoeff()) +
        ", mean weight " + fmt(weights[k].mean()));
  }
}

GaussianState load_init(const PipelineConfig& config, const ModelArgs& args) {
  const fs::path path = args.init.value_or(config.out / "init_state.json");
  const json j = io::read_json(path);
  try {
    return io::gaussian_state_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

SkillModel load_model(const PipelineConfig& config, const ModelArgs& args) {
  const fs::path path = args.model.value_or(config.out / "model.json");
  const json j = io::read_json(path);
  try {
    return io::skill_model_from_json(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

// Standard deviations from a scalar or a per-dimension array.
Eigen::VectorXd sigma_vector(const json& j, Eigen::Index dim) {
  if (j.is_number()) return Eigen::VectorXd::Constant(dim, j.get<double>());
  Eigen::VectorXd s = io::vector_from_json(j);
  if (s.size() != dim) fail(ErrorCode::kInvalidArgument, "anchor sigma has the wrong length");
  return s;
}

// Anchors may give a full state or positions only; in the latter case the
// velocity part is left effectively free.
StateAnchor parse_anchor(const json& j, std::size_t index, const GaussianTrajectoryPrior& prior) {
  const Eigen::Index d = prior.dimension();
  const Eigen::VectorXd state = io::vector_from_json(j.at("state"));
  const json sigma = j.value("sigma", json(1e-3));
  StateAnchor anchor;
  anchor.index = index;
  Eigen::VectorXd sd(d);
  if (state.size() == d) {
    anchor.target = state;
    sd = sigma_vector(sigma, d);
  } else if (2 * state.size() == d) {
    const Eigen::Index p = state.size();
    anchor.target = prior.marginals()[index].mean;
    anchor.target.head(p) = state;
    sd.head(p) = sigma_vector(sigma, p);
    sd.tail(p).setConstant(1e3);
  } else {
    fail(ErrorCode::kInvalidArgument, "anchor state must have D or D/2 entries");
  }
  if (!(sd.array() > 0.0).all()) fail(ErrorCode::kInvalidArgument, "anchor sigma must be positive");
  anchor.sigma = sd.array().square().matrix().asDiagonal();
  return anchor;
}

std::size_t node_index(long raw, std::size_t intervals) {
  const long n = static_cast<long>(intervals);
  const long idx = raw < 0 ? n + 1 + raw : raw;
  if (idx < 0 || idx > n) fail(ErrorCode::kInvalidArgument, "anchor index out of range");
  return static_cast<std::size_t>(idx);
}

}  // namespace

PipelineConfig load_config(const fs::path& path) {
  const json j = io::read_json(path);
  PipelineConfig c;
  c.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  try {
    for (const auto& d : j.value("demos", json::array())) {
      c.demos.push_back(resolve(c.base_dir, d.get<std::string>()));
    }
    if (j.contains("environment") && !j["environment"].is_null()) {
      c.environment = resolve(c.base_dir, j["environment"].get<std::string>());
    }
    c.grid_n = j.value("grid_n", c.grid_n);
    c.align = j.value("align", c.align);
    if (j.contains("reference_index") && !j["reference_index"].is_null()) {
      c.reference_index = j["reference_index"].get<std::size_t>();
    }
    if (j.contains("weights")) {
      c.weights.epsilon = j["weights"].value("epsilon", c.weights.epsilon);
      c.weights.sigma_obs = j["weights"].value("sigma_obs", c.weights.sigma_obs);
    }
    c.weighting = j.value("weighting", c.weighting);
    if (j.contains("lambda") && !j["lambda"].is_null()) c.lambda = j["lambda"].get<double>();
    c.q_min = j.value("q_min", c.q_min);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.rollout_samples = j.value("rollout_samples", c.rollout_samples);
    if (j.contains("reproduction")) {
      const json& r = j["reproduction"];
      if (r.is_string()) {
        const fs::path rp = resolve(c.base_dir, r.get<std::string>());
        c.reproduction = io::read_json(rp);
        c.reproduction["__base"] = (rp.has_parent_path() ? rp.parent_path() : fs::path(".")).string();
      } else {
        c.reproduction = r;
      }
    }
    if (j.contains("out")) c.out = resolve(c.base_dir, j["out"].get<std::string>());
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  if (c.grid_n < 1) fail(ErrorCode::kInvalidArgument, path.string() + ": grid_n must be >= 1");
  validate(c.weights);
  for (const auto& d : c.demos) {
    if (!fs::exists(d)) fail(ErrorCode::kIo, d.string() + ": demo file does not exist");
  }
  if (c.environment && !fs::exists(*c.environment)) {
    fail(ErrorCode::kIo, c.environment->string() + ": environment file does not exist");
  }
  return c;
}

int cmd_ingest(const PipelineConfig& config) {
  const DemoSet demos = load_demo_set(config);
  json list = json::array();
  for (std::size_t k = 0; k < demos.size(); ++k) {
    list.push_back(io::state_trajectory_to_json(demos[k]));
    io::atomic_write(config.out / ("demo_" + std::to_string(k) + ".csv"),
                     io::trajectory_csv(demos[k]));
  }
  io::write_json(config.out / "demos.json",
                 {{"N", demos.intervals()}, {"D", demos.dimension()}, {"dt", demos.dt()},
                  {"demos", list}});
  log("ingested " + std::to_string(demos.size()) + " demos onto N = " +
      std::to_string(demos.intervals()) + ", dt = " + fmt(demos.dt()));
  return kOk;
}

int cmd_weights(const PipelineConfig& config) {
  const DemoSet demos = load_demo_set(config);
  const auto weights = demo_weights(config, demos);
  io::atomic_write(config.out / "weights.csv", io::weights_csv(weights));
  report_weights(weights);
  return kOk;
}

int cmd_learn(const PipelineConfig& config) {
  const DemoSet demos = load_demo_set(config);
  const auto weights = demo_weights(config, demos);
  BatchOptions options;
  options.lambda = config.lambda;
  options.q_min = config.q_min;
  const BatchResult result = learn_batch(demos, weights, options);

  io::write_json(config.out / "model.json", io::skill_model_to_json(result.model));
  io::write_json(config.out / "init_state.json",
                 io::gaussian_state_to_json(initial_state_distribution(demos)));
  io::atomic_write(config.out / "weights.csv", io::weights_csv(weights));
  report_weights(weights);
  if (!result.degenerate_steps.empty()) {
    log("warning: " + std::to_string(result.degenerate_steps.size()) +
        " step(s) had degenerate weights; Q set to q_min * I there (first: step " +
        std::to_string(result.degenerate_steps.front()) + ")");
  }
  log("learned " + std::to_string(result.model.intervals()) + "-step model, D = " +
      std::to_string(result.model.dim));
  return kOk;
}

int cmd_assimilate(const PipelineConfig& config, const AssimilateArgs& args) {
  const fs::path ckpt_path = args.checkpoint.value_or(config.out / "checkpoint.json");

  // Everything is read and validated before the first write.
  std::optional<IncrementalLearner> learner;
  json start = json::object();
  if (fs::exists(ckpt_path)) {
    const json j = io::read_json(ckpt_path);
    try {
      learner = io::learner_from_checkpoint(j);
      start = j.value("start_stats", json::object());
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, ckpt_path.string() + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kParse, ckpt_path.string() + ": " + e.what());
    }
  }

  std::optional<StateTrajectory> demo;
  if (args.demo) demo = estimate_states(io::read_raw_demo(*args.demo), config.grid_n);

  if (!learner) {
    Eigen::Index dim = 0;
    if (demo) {
      dim = demo->dimension();
    } else if (args.state_dim) {
      dim = *args.state_dim;
    } else {
      fail(ErrorCode::kInvalidArgument, "new checkpoint needs --demo or --state-dim");
    }
    learner = IncrementalLearner::init_prior(config.grid_n, dim, config.alpha, config.beta);
  }

  const Eigen::Index d = learner->dimension();
  Eigen::VectorXd start_sum = start.contains("sum") ? io::vector_from_json(start["sum"])
                                                    : Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd start_scatter = start.contains("scatter") ? io::matrix_from_json(start["scatter"])
                                                            : Eigen::MatrixXd::Zero(d, d);

  if (demo) {
    const auto env_path = args.environment ? args.environment : config.environment;
    Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(demo->states.size()));
    if (config.weighting && env_path) {
      weights = weight_trajectory(*demo, io::read_environment(*env_path), config.weights);
    }
    learner->assimilate(*demo, weights);
    start_sum += demo->states.front();
    start_scatter += demo->states.front() * demo->states.front().transpose();
    log("assimilated demo " + std::to_string(learner->demos_seen()) + ": min weight " +
        fmt(weights.minCoeff()) + ", mean weight " + fmt(weights.mean()));
  }

  json ckpt = io::checkpoint_to_json(*learner);
  ckpt["start_stats"] = {{"sum", io::vector_to_json(start_sum)},
                         {"scatter", io::matrix_to_json(start_scatter)}};
  io::write_json(ckpt_path, ckpt);

  SkillModel model = learner->extract_map();
  if (!(model.dt > 0.0)) model.dt = 1.0 / static_cast<double>(model.intervals());
  io::write_json(config.out / "model.json", io::skill_model_to_json(model));
  if (learner->demos_seen() > 0) {
    const double k = static_cast<double>(learner->demos_seen());
    GaussianState init;
    init.mean = start_sum / k;
    init.cov = start_scatter / k - init.mean * init.mean.transpose();
    init.cov = 0.5 * (init.cov + init.cov.transpose());
    init.cov.diagonal().array() += 1e-8;
    io::write_json(config.out / "init_state.json", io::gaussian_state_to_json(init));
  } else {
    log("warning: no demonstrations assimilated yet; the extracted model is the prior mode");
  }
  return kOk;
}

int cmd_rollout(const PipelineConfig& config, const ModelArgs& args) {
  const GaussianTrajectoryPrior prior = build_joint_prior(load_model(config, args), load_init(config, args));
  io::atomic_write(config.out / "prior.csv", io::prior_csv(prior));

  const auto samples = sample_trajectories(prior, std::max<std::size_t>(1, config.rollout_samples), config.seed);
  std::ostringstream csv;
  csv << "sample,node,t";
  for (Eigen::Index a = 1; a <= prior.dimension(); ++a) csv << ",x_" << a;
  csv << "\n" << std::setprecision(17);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t i = 0; i < samples[s].states.size(); ++i) {
      csv << s << "," << i << "," << static_cast<double>(i) * prior.dt();
      for (Eigen::Index a = 0; a < prior.dimension(); ++a) csv << "," << samples[s].states[i](a);
      csv << "\n";
    }
  }
  io::atomic_write(config.out / "samples.csv", csv.str());

  const auto env = load_environment(config.environment);
  io::atomic_write(config.out / "prior.svg", svg::render(prior, env ? &*env : nullptr, {}, samples));
  log("rolled out prior over " + std::to_string(prior.intervals()) + " steps with " +
      std::to_string(samples.size()) + " samples");
  return kOk;
}

int cmd_reproduce(const PipelineConfig& config, const ModelArgs& args) {
  const GaussianTrajectoryPrior prior = build_joint_prior(load_model(config, args), load_init(config, args));
  const json& spec = config.reproduction;
  const fs::path base = spec.contains("__base") ? fs::path(spec["__base"].get<std::string>())
                                                : config.base_dir;
  const std::size_t n = prior.intervals();
  const Eigen::Index d = prior.dimension();

  OptimizerOptions options;
  double eps_repro = 0.1;
  double sigma_repro = 0.05;
  double resolution = 0.01;
  double margin = 0.5;
  std::optional<Environment> env;
  std::vector<StateAnchor> shared;
  std::vector<StateAnchor> starts;
  try {
    eps_repro = spec.value("eps_repro", eps_repro);
    sigma_repro = spec.value("sigma_repro", sigma_repro);
    resolution = spec.value("sdf_resolution", resolution);
    margin = spec.value("sdf_margin", margin);
    options.tol_clear = spec.value("tol_clear", options.tol_clear);
    if (spec.contains("optimizer")) {
      const json& o = spec["optimizer"];
      options.max_iters = o.value("max_iters", options.max_iters);
      options.abs_tol = o.value("abs_tol", options.abs_tol);
      options.rel_tol = o.value("rel_tol", options.rel_tol);
      options.lm_damping_init = o.value("lm_damping_init", options.lm_damping_init);
    }
    if (spec.contains("environment") && !spec["environment"].is_null()) {
      env = io::read_environment(resolve(base, spec["environment"].get<std::string>()));
    }
    for (const json& a : spec.value("anchors", json::array())) {
      shared.push_back(parse_anchor(a, node_index(a.at("index").get<long>(), n), prior));
    }
    for (const json& s : spec.value("starts", json::array())) {
      starts.push_back(parse_anchor(s, 0, prior));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("reproduction spec: ") + e.what());
  }

  std::vector<EventFactor> obstacles;
  if (env && !env->obstacles().empty()) {
    const Eigen::Index p = env->dimension();
    if (2 * p != d) fail(ErrorCode::kDimensionMismatch, "environment dimension must be D/2");
    Eigen::VectorXd lo = env->obstacle_bounds().first;
    Eigen::VectorXd hi = env->obstacle_bounds().second;
    for (const auto& m : prior.marginals()) {
      const Eigen::VectorXd sd = m.cov.diagonal().head(p).cwiseMax(0.0).cwiseSqrt();
      lo = lo.cwiseMin(m.mean.head(p) - 3.0 * sd);
      hi = hi.cwiseMax(m.mean.head(p) + 3.0 * sd);
    }
    for (const auto* set : {&shared, &starts}) {
      for (const auto& a : *set) {
        lo = lo.cwiseMin(a.target.head(p));
        hi = hi.cwiseMax(a.target.head(p));
      }
    }
    lo.array() -= margin;
    hi.array() += margin;
    auto sdf = std::make_shared<const SignedDistanceField>(
        SignedDistanceField::build(*env, lo, hi, resolution));
    obstacles = obstacle_factors(sdf, n, eps_repro, sigma_repro);
  }

  // One solve per start; without starts, a single solve on the shared anchors.
  std::vector<std::optional<StateAnchor>> runs;
  for (const auto& s : starts) runs.emplace_back(s);
  if (runs.empty()) runs.emplace_back(std::nullopt);

  int status = kOk;
  std::vector<StateTrajectory> paths;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    ReproductionProblem problem{prior, obstacles, options};
    for (const auto& a : shared) problem.factors.emplace_back(a);
    if (runs[r]) problem.factors.emplace_back(*runs[r]);

    const Solution sol = optimize_map(problem);
    const std::string stem = "solution_" + std::to_string(r);
    io::atomic_write(config.out / (stem + ".csv"), io::trajectory_csv(sol.trajectory));
    io::write_json(config.out / (stem + ".json"), io::solution_summary(sol));
    io::atomic_write(config.out / ("reproduce_" + std::to_string(r) + ".svg"),
                     svg::render(prior, env ? &*env : nullptr, {sol.trajectory}));
    paths.push_back(sol.trajectory);

    log(stem + ": objective " + fmt(sol.objective) + ", iterations " +
        std::to_string(sol.iterations) + (sol.converged ? ", converged" : ", NOT converged") +
        (obstacles.empty() ? "" : ", min clearance " + fmt(sol.min_clearance)));
    if (!sol.feasible) log("warning: " + stem + " violates the obstacle clearance tolerance");
    if (!sol.converged) status = kNotConverged;
  }
  io::atomic_write(config.out / "reproduce.svg", svg::render(prior, env ? &*env : nullptr, paths));
  return status;
}

}  // namespace iwsl::cli
