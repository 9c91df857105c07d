#include "iwsl/batch_learning.hpp"
#include "iwsl/demonstrations.hpp"
#include "iwsl/environment.hpp"
#include "iwsl/error.hpp"
#include "iwsl/incremental_learning.hpp"
#include "iwsl/io.hpp"
#include "iwsl/prior.hpp"
#include "iwsl/reproduction.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace iwsl;

namespace {

RawDemo make_raw(std::vector<double> t, Eigen::MatrixXd positions) {
  return RawDemo{std::move(t), std::move(positions)};
}

StateTrajectory make_traj(const Eigen::MatrixXd& states, double dt) {
  StateTrajectory traj;
  traj.dt = dt;
  for (Eigen::Index i = 0; i < states.rows(); ++i) traj.states.emplace_back(states.row(i).transpose());
  return traj;
}

Eigen::MatrixXd traj_matrix(const StateTrajectory& traj) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(traj.states.size()), traj.dimension());
  for (std::size_t i = 0; i < traj.states.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = traj.states[i].transpose();
  return m;
}

DemoSet make_demo_set(const std::vector<Eigen::MatrixXd>& demos, double dt) {
  std::vector<StateTrajectory> trajs;
  for (const auto& d : demos) trajs.push_back(make_traj(d, dt));
  return DemoSet(std::move(trajs));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Importance-weighted skill learning: core bindings";

  py::register_exception<Error>(m, "Error");

  // Demonstrations: states are returned as (N+1) x D arrays.
  m.def("estimate_states",
        [](std::vector<double> t, Eigen::MatrixXd positions, std::size_t n) {
          const StateTrajectory traj = estimate_states(make_raw(std::move(t), std::move(positions)), n);
          return py::make_tuple(traj_matrix(traj), traj.dt);
        },
        py::arg("timestamps"), py::arg("positions"), py::arg("intervals"));
  m.def("dtw_cost", [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return dtw(a, b).cost; });
  m.def("dtw_align",
        [](const std::vector<std::vector<double>>& times, const std::vector<Eigen::MatrixXd>& positions,
           std::optional<std::size_t> reference) {
          std::vector<RawDemo> raw;
          for (std::size_t k = 0; k < times.size(); ++k) raw.push_back(make_raw(times.at(k), positions.at(k)));
          std::vector<Eigen::MatrixXd> out;
          for (const auto& d : dtw_align(raw, reference)) out.push_back(d.positions);
          return out;
        },
        py::arg("timestamps"), py::arg("positions"), py::arg("reference") = py::none());

  // Environment.
  py::class_<WeightParams>(m, "WeightParams")
      .def(py::init<>())
      .def(py::init([](double eps, double sigma) { return WeightParams{eps, sigma}; }),
           py::arg("epsilon"), py::arg("sigma_obs"))
      .def_readwrite("epsilon", &WeightParams::epsilon)
      .def_readwrite("sigma_obs", &WeightParams::sigma_obs);
  py::class_<DistanceSource, std::shared_ptr<DistanceSource>>(m, "DistanceSource")
      .def("distance", &DistanceSource::distance)
      .def_property_readonly("dimension", &DistanceSource::dimension);
  py::class_<Environment, DistanceSource, std::shared_ptr<Environment>>(m, "Environment")
      .def(py::init([](const std::string& json_text) {
             return io::environment_from_json(nlohmann::json::parse(json_text));
           }),
           py::arg("json"));
  py::class_<SignedDistanceField, DistanceSource, std::shared_ptr<SignedDistanceField>>(m, "SignedDistanceField")
      .def_static("build", &SignedDistanceField::build)
      .def("gradient", &SignedDistanceField::gradient)
      .def_property_readonly("resolution", &SignedDistanceField::resolution);
  m.def("hinge_cost", py::overload_cast<double, double>(&hinge_cost), py::arg("distance"), py::arg("epsilon"));
  m.def("importance_weight", py::overload_cast<double, const WeightParams&>(&importance_weight),
        py::arg("distance"), py::arg("params"));
  m.def("weight_trajectory",
        [](const Eigen::MatrixXd& states, const DistanceSource& scene, const WeightParams& params) {
          return weight_trajectory(make_traj(states, 1.0), scene, params);
        });

  // Learning.
  m.def("batch_estimate_step",
        [](Eigen::MatrixXd inputs, Eigen::MatrixXd targets, Eigen::VectorXd weights, std::optional<double> lambda) {
          BatchOptions options;
          options.lambda = lambda;
          const StepEstimate est = batch_estimate_step({std::move(inputs), std::move(targets), std::move(weights)}, options);
          return py::make_tuple(est.model.phi_tilde, est.model.q, est.normalizer, est.degenerate_weights);
        },
        py::arg("inputs"), py::arg("targets"), py::arg("weights"), py::arg("lam") = py::none(),
        "inputs: (D+1) x K with a leading row of ones; targets: D x K. Returns (Phi_tilde, Q, z, degenerate).");

  py::class_<SkillModel>(m, "SkillModel")
      .def_readonly("dt", &SkillModel::dt)
      .def_readonly("dim", &SkillModel::dim)
      .def("phi_tilde", [](const SkillModel& s, std::size_t i) { return s.steps.at(i).phi_tilde; })
      .def("q", [](const SkillModel& s, std::size_t i) { return s.steps.at(i).q; })
      .def("__len__", &SkillModel::intervals)
      .def("to_json", [](const SkillModel& s) { return io::skill_model_to_json(s).dump(); });

  m.def("learn_batch",
        [](const std::vector<Eigen::MatrixXd>& demos, double dt, std::optional<std::vector<Eigen::VectorXd>> weights,
           std::optional<double> lambda) {
          const DemoSet set = make_demo_set(demos, dt);
          BatchOptions options;
          options.lambda = lambda;
          return learn_batch(set, weights.value_or(unit_weights(set)), options).model;
        },
        py::arg("demos"), py::arg("dt"), py::arg("weights") = py::none(), py::arg("lam") = py::none());

  py::class_<IncrementalLearner>(m, "IncrementalLearner")
      .def_static("init_prior", &IncrementalLearner::init_prior, py::arg("intervals"), py::arg("dim"),
                  py::arg("alpha") = 1e10, py::arg("beta") = 1e10, py::arg("dt") = 0.0)
      .def("assimilate",
           [](IncrementalLearner& l, const Eigen::MatrixXd& states, double dt, const Eigen::VectorXd& w) {
             l.assimilate(make_traj(states, dt), w);
           })
      .def("extract_map", &IncrementalLearner::extract_map)
      .def_property_readonly("demos_seen", &IncrementalLearner::demos_seen)
      .def("nu", [](const IncrementalLearner& l, std::size_t i) { return l.steps().at(i).nu; });

  // Prior and reproduction.
  m.def("rollout_moments",
        [](const SkillModel& model, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
          std::vector<Eigen::VectorXd> means;
          std::vector<Eigen::MatrixXd> covs;
          for (const auto& g : rollout_moments(model, {mean, cov})) {
            means.push_back(g.mean);
            covs.push_back(g.cov);
          }
          return py::make_tuple(means, covs);
        });
  py::class_<GaussianTrajectoryPrior>(m, "GaussianTrajectoryPrior")
      .def(py::init([](const SkillModel& model, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
        return build_joint_prior(model, {mean, cov});
      }))
      .def_property_readonly("mean", &GaussianTrajectoryPrior::mean)
      .def("dense_covariance", &GaussianTrajectoryPrior::dense_covariance)
      .def("dense_precision", [](const GaussianTrajectoryPrior& p) { return p.precision().to_dense(); })
      .def("sample", [](const GaussianTrajectoryPrior& p, std::size_t n, std::uint64_t seed) {
        std::vector<Eigen::MatrixXd> out;
        for (const auto& t : sample_trajectories(p, n, seed)) out.push_back(traj_matrix(t));
        return out;
      });

  m.def("optimize_map",
        [](const GaussianTrajectoryPrior& prior, const std::vector<std::tuple<std::size_t, Eigen::VectorXd, Eigen::MatrixXd>>& anchors,
           std::shared_ptr<SignedDistanceField> sdf, double eps_repro, double sigma_repro, int max_iters) {
          ReproductionProblem problem{prior, {}, {}};
          problem.options.max_iters = max_iters;
          for (const auto& [idx, target, sigma] : anchors) problem.factors.emplace_back(StateAnchor{idx, target, sigma});
          if (sdf) {
            for (auto& f : obstacle_factors(sdf, prior.intervals(), eps_repro, sigma_repro)) problem.factors.push_back(std::move(f));
          }
          const Solution sol = optimize_map(problem);
          py::dict out;
          out["trajectory"] = traj_matrix(sol.trajectory);
          out["objective"] = sol.objective;
          out["iterations"] = sol.iterations;
          out["converged"] = sol.converged;
          out["feasible"] = sol.feasible;
          out["min_clearance"] = sol.min_clearance;
          return out;
        },
        py::arg("prior"), py::arg("anchors") = std::vector<std::tuple<std::size_t, Eigen::VectorXd, Eigen::MatrixXd>>{},
        py::arg("sdf") = nullptr, py::arg("eps_repro") = 0.1, py::arg("sigma_repro") = 0.05,
        py::arg("max_iters") = 100);
}
