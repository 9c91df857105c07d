#include "iwsl/reproduction.hpp"

#include "iwsl/block_tridiagonal.hpp"
#include "iwsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace iwsl {
namespace {

constexpr double kMaxDamping = 1e12;

struct AnchorTerm {
  Eigen::Index offset;
  Eigen::VectorXd target;
  Eigen::MatrixXd information;
};

struct ObstacleTerm {
  Eigen::Index offset;
  const SignedDistanceField* sdf;
  double eps;
  double inv_var;
};

// Factors with precomputed information matrices and stacked offsets.
struct Terms {
  std::vector<AnchorTerm> anchors;
  std::vector<ObstacleTerm> obstacles;
};

Terms compile(const ReproductionProblem& problem) {
  const Eigen::Index d = problem.prior.dimension();
  Terms terms;
  for (const auto& factor : problem.factors) {
    if (const auto* a = std::get_if<StateAnchor>(&factor)) {
      const Eigen::LLT<Eigen::MatrixXd> llt(a->sigma);
      terms.anchors.push_back({static_cast<Eigen::Index>(a->index) * d, a->target,
                               llt.solve(Eigen::MatrixXd::Identity(d, d))});
    } else {
      const auto& o = std::get<ObstacleFactor>(factor);
      terms.obstacles.push_back({static_cast<Eigen::Index>(o.index) * d, o.sdf.get(), o.eps_repro,
                                 1.0 / (o.sigma_repro * o.sigma_repro)});
    }
  }
  return terms;
}

double evaluate(const Eigen::VectorXd& x, const ReproductionProblem& problem, const Terms& terms) {
  const Eigen::Index d = problem.prior.dimension();
  double total = 0.5 * problem.prior.mahalanobis_squared(x);
  for (const auto& a : terms.anchors) {
    const Eigen::VectorXd h = x.segment(a.offset, d) - a.target;
    total += 0.5 * h.dot(a.information * h);
  }
  for (const auto& o : terms.obstacles) {
    const double c = obstacle_cost(x.segment(o.offset, d), *o.sdf, o.eps).cost;
    total += 0.5 * c * c * o.inv_var;
  }
  return total;
}

// Gradient and Gauss-Newton Hessian of the objective at x.
void linearize(const Eigen::VectorXd& x, const ReproductionProblem& problem, const Terms& terms,
               Eigen::VectorXd& gradient, BlockTridiagonal& hessian) {
  const Eigen::Index d = problem.prior.dimension();
  hessian = problem.prior.precision();
  gradient = hessian.multiply(x - problem.prior.mean());
  for (const auto& a : terms.anchors) {
    const auto node = static_cast<std::size_t>(a.offset / d);
    gradient.segment(a.offset, d) += a.information * (x.segment(a.offset, d) - a.target);
    hessian.diagonal[node] += a.information;
  }
  for (const auto& o : terms.obstacles) {
    const auto node = static_cast<std::size_t>(o.offset / d);
    const ObstacleCost oc = obstacle_cost(x.segment(o.offset, d), *o.sdf, o.eps);
    gradient.segment(o.offset, d) += o.inv_var * oc.cost * oc.gradient;
    hessian.diagonal[node] += o.inv_var * oc.gradient * oc.gradient.transpose();
  }
}

}  // namespace

void ReproductionProblem::validate() const {
  const std::size_t n = prior.intervals();
  const Eigen::Index d = prior.dimension();
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const std::string tag = "factor " + std::to_string(k);
    if (const auto* a = std::get_if<StateAnchor>(&factors[k])) {
      if (a->index > n) fail(ErrorCode::kInvalidArgument, tag + ": node index out of range");
      if (a->target.size() != d || a->sigma.rows() != d || a->sigma.cols() != d) {
        fail(ErrorCode::kDimensionMismatch, tag + ": anchor does not match state dimension");
      }
      if (!a->sigma.isApprox(a->sigma.transpose()) ||
          Eigen::LLT<Eigen::MatrixXd>(a->sigma).info() != Eigen::Success) {
        fail(ErrorCode::kInvalidArgument, tag + ": anchor covariance must be SPD");
      }
    } else {
      const auto& o = std::get<ObstacleFactor>(factors[k]);
      if (o.index > n) fail(ErrorCode::kInvalidArgument, tag + ": node index out of range");
      if (!o.sdf) fail(ErrorCode::kInvalidArgument, tag + ": missing distance field");
      if (o.sdf->dimension() > d) {
        fail(ErrorCode::kDimensionMismatch, tag + ": field dimension exceeds state dimension");
      }
      if (!(o.eps_repro >= 0.0) || !(o.sigma_repro > 0.0)) {
        fail(ErrorCode::kInvalidArgument, tag + ": need eps_repro >= 0 and sigma_repro > 0");
      }
    }
  }
  if (options.max_iters < 1 || !(options.lm_damping_init > 0.0)) {
    fail(ErrorCode::kInvalidArgument, "optimizer options out of range");
  }
}

ObstacleCost obstacle_cost(const Eigen::VectorXd& state, const SignedDistanceField& sdf,
                           double eps_repro) {
  const int p = sdf.dimension();
  if (state.size() < p) fail(ErrorCode::kDimensionMismatch, "state shorter than field dimension");
  ObstacleCost out;
  out.gradient = Eigen::VectorXd::Zero(state.size());
  const Eigen::VectorXd position = state.head(p);
  const double d = sdf.distance(position);
  if (d > eps_repro) return out;
  out.cost = eps_repro - d;
  out.gradient.head(p) = -sdf.gradient(position);
  return out;
}

std::vector<EventFactor> obstacle_factors(std::shared_ptr<const SignedDistanceField> sdf,
                                          std::size_t intervals, double eps_repro,
                                          double sigma_repro) {
  std::vector<EventFactor> factors;
  factors.reserve(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    factors.emplace_back(ObstacleFactor{i, sdf, eps_repro, sigma_repro});
  }
  return factors;
}

double negative_log_posterior(const Eigen::VectorXd& x, const ReproductionProblem& problem) {
  problem.validate();
  return evaluate(x, problem, compile(problem));
}

Solution optimize_map(const ReproductionProblem& problem) {
  problem.validate();
  const Terms terms = compile(problem);
  const auto& opts = problem.options;
  const Eigen::Index d = problem.prior.dimension();

  Eigen::VectorXd x = problem.prior.mean();
  double f = evaluate(x, problem, terms);

  Solution sol;
  sol.objective_history.push_back(f);
  double damping = opts.lm_damping_init;
  Eigen::VectorXd gradient;
  BlockTridiagonal hessian;
  BlockTridiagonalCholesky solver;

  while (sol.iterations < opts.max_iters) {
    linearize(x, problem, terms, gradient, hessian);
    if (gradient.norm() < opts.abs_tol) {
      sol.converged = true;
      break;
    }

    bool accepted = false;
    bool factored_once = false;
    while (damping <= kMaxDamping) {
      BlockTridiagonal damped = hessian;
      for (auto& block : damped.diagonal) {
        block.diagonal() += damping * block.diagonal().cwiseAbs();
      }
      if (!solver.compute(damped)) {
        damping *= 10.0;
        continue;
      }
      factored_once = true;
      const Eigen::VectorXd candidate = x - solver.solve(gradient);
      double f_new = std::numeric_limits<double>::infinity();
      try {
        f_new = evaluate(candidate, problem, terms);
      } catch (const Error& e) {
        // Steps leaving the distance field are rejected like uphill steps.
        if (e.code() != ErrorCode::kOutOfBounds) throw;
      }
      if (f_new < f) {
        const double decrease = (f - f_new) / std::max(f, std::numeric_limits<double>::min());
        x = candidate;
        f = f_new;
        sol.objective_history.push_back(f);
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        ++sol.iterations;
        if (decrease < opts.rel_tol) sol.converged = true;
        break;
      }
      damping *= 10.0;
    }

    if (!factored_once) {
      fail(ErrorCode::kSingularNormalEquations,
           "normal equations stayed singular under maximum damping");
    }
    if (!accepted) {
      // No descent direction survives heavy damping: a numerical stationary point.
      sol.converged = true;
      break;
    }
    if (sol.converged) break;
  }

  sol.objective = f;
  sol.trajectory = StateTrajectory::from_stacked(x, d, problem.prior.dt());
  for (const auto& o : terms.obstacles) {
    const double dist = o.sdf->distance(x.segment(o.offset, o.sdf->dimension()));
    sol.min_clearance = std::min(sol.min_clearance, dist);
    if (dist < o.eps - opts.tol_clear) sol.feasible = false;
  }
  return sol;
}

}  // namespace iwsl
