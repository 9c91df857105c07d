#include "iwsl/io.hpp"

#include "iwsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace iwsl::io {
namespace fs = std::filesystem;

namespace {

void put(std::ostringstream& out, double v) { out << std::setprecision(17) << v; }

template <typename F>
auto parse_guard(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, context + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), context + ": " + e.what());
  }
}

}  // namespace

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kParse, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::kParse, "ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::kParse, "vector must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, tmp.string() + ": cannot open for writing");
    out << content;
    if (!out.flush()) fail(ErrorCode::kIo, tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, path.string() + ": rename failed: " + ec.message());
}

void write_json(const fs::path& path, const json& j) { atomic_write(path, j.dump(2) + "\n"); }

RawDemo raw_demo_from_json(const json& j) {
  return parse_guard("demo", [&] {
    RawDemo demo;
    demo.timestamps = j.at("timestamps").get<std::vector<double>>();
    demo.positions = matrix_from_json(j.at("positions"));
    return demo;
  });
}

json raw_demo_to_json(const RawDemo& demo) {
  return {{"timestamps", demo.timestamps}, {"positions", matrix_to_json(demo.positions)}};
}

RawDemo raw_demo_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(cells, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      fail(ErrorCode::kParse, "non-numeric CSV cell on line " + std::to_string(line_no));
    }
    if (row.size() < 2) fail(ErrorCode::kParse, "CSV line " + std::to_string(line_no) + " needs time and position");
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::kParse, "CSV line " + std::to_string(line_no) + " has a different column count");
    }
    rows.push_back(std::move(row));
  }
  RawDemo demo;
  if (rows.empty()) return demo;
  demo.positions.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size() - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    demo.timestamps.push_back(rows[r][0]);
    for (std::size_t c = 1; c < rows[r].size(); ++c) {
      demo.positions(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = rows[r][c];
    }
  }
  return demo;
}

RawDemo read_raw_demo(const fs::path& path) {
  return parse_guard(path.string(), [&] {
    if (path.extension() == ".csv") return raw_demo_from_csv(read_text(path));
    return raw_demo_from_json(read_json(path));
  });
}

Environment environment_from_json(const json& j) {
  return parse_guard("environment", [&] {
    const int dim = j.at("dimension").get<int>();
    std::vector<Obstacle> obstacles;
    for (const json& o : j.value("obstacles", json::array())) {
      const std::string type = o.at("type").get<std::string>();
      if (type == "sphere") {
        obstacles.emplace_back(Sphere{vector_from_json(o.at("center")), o.at("radius").get<double>()});
      } else if (type == "box") {
        obstacles.emplace_back(Box{vector_from_json(o.at("min")), vector_from_json(o.at("max"))});
      } else {
        fail(ErrorCode::kParse, "unknown obstacle type '" + type + "'");
      }
    }
    return Environment(dim, std::move(obstacles));
  });
}

json environment_to_json(const Environment& env) {
  json obstacles = json::array();
  for (const auto& o : env.obstacles()) {
    if (const auto* s = std::get_if<Sphere>(&o)) {
      obstacles.push_back({{"type", "sphere"}, {"center", vector_to_json(s->center)}, {"radius", s->radius}});
    } else {
      const auto& b = std::get<Box>(o);
      obstacles.push_back({{"type", "box"}, {"min", vector_to_json(b.min)}, {"max", vector_to_json(b.max)}});
    }
  }
  return {{"dimension", env.dimension()}, {"obstacles", obstacles}};
}

Environment read_environment(const fs::path& path) {
  return parse_guard(path.string(), [&] { return environment_from_json(read_json(path)); });
}

json skill_model_to_json(const SkillModel& model) {
  json steps = json::array();
  for (const auto& s : model.steps) {
    steps.push_back({{"Phi_tilde", matrix_to_json(s.phi_tilde)}, {"Q", matrix_to_json(s.q)}});
  }
  return {{"dt", model.dt}, {"D", model.dim}, {"steps", steps}};
}

SkillModel skill_model_from_json(const json& j) {
  return parse_guard("skill model", [&] {
    SkillModel model;
    model.dt = j.at("dt").get<double>();
    model.dim = j.at("D").get<Eigen::Index>();
    for (const json& s : j.at("steps")) {
      model.steps.push_back({matrix_from_json(s.at("Phi_tilde")), matrix_from_json(s.at("Q"))});
    }
    model.validate();
    return model;
  });
}

json gaussian_state_to_json(const GaussianState& state) {
  return {{"mean", vector_to_json(state.mean)}, {"cov", matrix_to_json(state.cov)}};
}

GaussianState gaussian_state_from_json(const json& j) {
  return parse_guard("Gaussian state", [&] {
    GaussianState s{vector_from_json(j.at("mean")), matrix_from_json(j.at("cov"))};
    if (s.cov.rows() != s.mean.size() || s.cov.cols() != s.mean.size()) {
      fail(ErrorCode::kDimensionMismatch, "Gaussian mean and covariance sizes differ");
    }
    return s;
  });
}

json checkpoint_to_json(const IncrementalLearner& learner) {
  json steps = json::array();
  for (const auto& s : learner.steps()) {
    steps.push_back({{"M", matrix_to_json(s.m)},
                     {"R", matrix_to_json(s.r)},
                     {"V", matrix_to_json(s.v)},
                     {"nu", s.nu}});
  }
  return {{"alpha", learner.alpha()},
          {"beta", learner.beta()},
          {"demos_seen", learner.demos_seen()},
          {"dt", learner.dt()},
          {"D", learner.dimension()},
          {"steps", steps}};
}

IncrementalLearner learner_from_checkpoint(const json& j) {
  return parse_guard("checkpoint", [&] {
    std::vector<MniwState> steps;
    for (const json& s : j.at("steps")) {
      steps.push_back({matrix_from_json(s.at("M")), matrix_from_json(s.at("R")),
                       matrix_from_json(s.at("V")), s.at("nu").get<double>()});
    }
    return IncrementalLearner(std::move(steps), j.at("alpha").get<double>(), j.at("beta").get<double>(),
                              j.at("demos_seen").get<std::size_t>(), j.at("dt").get<double>());
  });
}

json state_trajectory_to_json(const StateTrajectory& traj) {
  json states = json::array();
  for (const auto& x : traj.states) states.push_back(vector_to_json(x));
  return {{"dt", traj.dt}, {"states", states}};
}

StateTrajectory state_trajectory_from_json(const json& j) {
  return parse_guard("trajectory", [&] {
    StateTrajectory traj;
    traj.dt = j.at("dt").get<double>();
    for (const json& x : j.at("states")) traj.states.push_back(vector_from_json(x));
    return traj;
  });
}

std::string prior_csv(const GaussianTrajectoryPrior& prior) {
  std::ostringstream out;
  const Eigen::Index d = prior.dimension();
  out << "t";
  for (Eigen::Index a = 1; a <= d; ++a) out << ",mean_" << a;
  for (Eigen::Index a = 1; a <= d; ++a) out << ",std_" << a;
  out << "\n";
  const auto& marginals = prior.marginals();
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    put(out, static_cast<double>(i) * prior.dt());
    for (Eigen::Index a = 0; a < d; ++a) {
      out << ",";
      put(out, marginals[i].mean(a));
    }
    for (Eigen::Index a = 0; a < d; ++a) {
      out << ",";
      put(out, std::sqrt(std::max(0.0, marginals[i].cov(a, a))));
    }
    out << "\n";
  }
  return out.str();
}

std::string trajectory_csv(const StateTrajectory& traj) {
  std::ostringstream out;
  const Eigen::Index d = traj.dimension();
  out << "t";
  for (Eigen::Index a = 1; a <= d; ++a) out << ",x_" << a;
  out << "\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    put(out, static_cast<double>(i) * traj.dt);
    for (Eigen::Index a = 0; a < d; ++a) {
      out << ",";
      put(out, traj.states[i](a));
    }
    out << "\n";
  }
  return out.str();
}

std::string weights_csv(const std::vector<Eigen::VectorXd>& weights) {
  std::ostringstream out;
  out << "demo,node,weight\n";
  for (std::size_t k = 0; k < weights.size(); ++k) {
    for (Eigen::Index i = 0; i < weights[k].size(); ++i) {
      out << k << "," << i << ",";
      put(out, weights[k](i));
      out << "\n";
    }
  }
  return out.str();
}

json solution_summary(const Solution& solution) {
  return {{"objective", solution.objective},
          {"iterations", solution.iterations},
          {"converged", solution.converged},
          {"feasible", solution.feasible},
          {"min_clearance", solution.min_clearance}};
}

}  // namespace iwsl::io
