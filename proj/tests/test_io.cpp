#include "iwsl/error.hpp"
#include "iwsl/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace iwsl {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("iwsl_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  fs::path dir;
};

TEST(SkillModelJson, RoundTripIsExact) {
  std::mt19937_64 rng(61);
  const SkillModel model = testing::random_model(rng, 5, 3);
  const io::json j = io::skill_model_to_json(model);
  const SkillModel back = io::skill_model_from_json(io::json::parse(j.dump(2)));
  EXPECT_EQ(back.dt, model.dt);
  EXPECT_EQ(back.dim, 3);
  ASSERT_EQ(back.steps.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(back.steps[i].phi_tilde, model.steps[i].phi_tilde);
    EXPECT_EQ(back.steps[i].q, model.steps[i].q);
  }
  EXPECT_EQ(j["steps"][0]["Phi_tilde"].size(), 3u);
  EXPECT_EQ(j["steps"][0]["Phi_tilde"][0].size(), 4u);
}

TEST(SkillModelJson, RejectsMalformedInput) {
  const auto expect_parse = [](const std::string& text) {
    try {
      io::skill_model_from_json(io::json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kParse || e.code() == ErrorCode::kDimensionMismatch) << e.what();
    }
  };
  expect_parse(R"({"dt": 0.1, "steps": []})");
  expect_parse(R"({"dt": 0.1, "D": 1, "steps": [{"Phi_tilde": [[1, 2]], "Q": "x"}]})");
  expect_parse(R"({"dt": 0.1, "D": 1, "steps": [{"Phi_tilde": [[1, 2], [3]], "Q": [[1]]}]})");
  expect_parse(R"({"dt": 0.1, "D": 2, "steps": [{"Phi_tilde": [[1, 2]], "Q": [[1]]}]})");
}

TEST(CheckpointJson, RestoredLearnerMatches) {
  std::mt19937_64 rng(62);
  const DemoSet demos = testing::random_demos(rng, 4, 3, 2);
  auto learner = IncrementalLearner::init_prior(3, 2, 1e10, 1e10);
  for (std::size_t k = 0; k < 4; ++k) learner.assimilate(demos[k], Eigen::VectorXd::Ones(4));
  const auto back = io::learner_from_checkpoint(io::json::parse(io::checkpoint_to_json(learner).dump()));
  EXPECT_EQ(back.demos_seen(), 4u);
  EXPECT_EQ(back.alpha(), 1e10);
  EXPECT_EQ(back.dt(), 0.1);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.steps()[i].m, learner.steps()[i].m);
    EXPECT_EQ(back.steps()[i].r, learner.steps()[i].r);
    EXPECT_EQ(back.steps()[i].v, learner.steps()[i].v);
    EXPECT_EQ(back.steps()[i].nu, learner.steps()[i].nu);
  }
  try {
    io::learner_from_checkpoint(io::json::parse(R"({"alpha": 1, "steps": [{"M": [[0, 0]]}]})"));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(EnvironmentJson, RoundTrip) {
  const std::string text = R"({"dimension": 2, "obstacles": [
      {"type": "sphere", "center": [1.0, 0.5], "radius": 0.25},
      {"type": "box", "min": [-1.0, -1.0], "max": [0.0, -0.5]}]})";
  const Environment env = io::environment_from_json(io::json::parse(text));
  ASSERT_EQ(env.obstacles().size(), 2u);
  EXPECT_DOUBLE_EQ(env.distance(Eigen::Vector2d(1.0, 0.5)), -0.25);
  const Environment back = io::environment_from_json(io::environment_to_json(env));
  EXPECT_EQ(io::environment_to_json(back), io::environment_to_json(env));
  EXPECT_THROW(io::environment_from_json(io::json::parse(R"({"dimension": 2, "obstacles": [{"type": "cone"}]})")),
               Error);
}

TEST_F(TempDir, RawDemoFormats) {
  const fs::path csv = dir / "demo.csv";
  io::atomic_write(csv, "t,x,y\n0,0,1\n0.5,1,1\n1.0,2,1\n1.5,3,1\n");
  const RawDemo a = io::read_raw_demo(csv);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a.positions.cols(), 2);
  EXPECT_EQ(a.positions(3, 0), 3.0);
  const fs::path js = dir / "demo.json";
  io::write_json(js, io::raw_demo_to_json(a));
  const RawDemo b = io::read_raw_demo(js);
  EXPECT_EQ(b.timestamps, a.timestamps);
  EXPECT_EQ(b.positions, a.positions);
}

TEST_F(TempDir, RawDemoErrorsCarryPath) {
  const fs::path bad = dir / "bad.csv";
  io::atomic_write(bad, "t,x\n0,1\n1,oops\n");
  try {
    io::read_raw_demo(bad);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("bad.csv"), std::string::npos);
  }
  try {
    io::read_raw_demo(dir / "missing.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
  io::atomic_write(dir / "broken.json", "{\"timestamps\": [0, 1");
  EXPECT_THROW(io::read_raw_demo(dir / "broken.json"), Error);
}

TEST_F(TempDir, AtomicWriteReplacesWithoutLeftovers) {
  const fs::path target = dir / "sub" / "out.txt";
  io::atomic_write(target, "first");
  io::atomic_write(target, "second");
  EXPECT_EQ(io::read_text(target), "second");
  std::size_t entries = 0;
  for (const auto& e : fs::directory_iterator(target.parent_path())) {
    (void)e;
    ++entries;
  }
  EXPECT_EQ(entries, 1u);
}

TEST(Csv, PriorColumnsAndValues) {
  SkillModel model;
  model.dt = 0.5;
  model.dim = 1;
  model.steps.push_back({Eigen::RowVector2d(1.0, 1.0), Eigen::MatrixXd::Constant(1, 1, 3.0)});
  const GaussianTrajectoryPrior prior(model, {Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 1.0)});
  EXPECT_EQ(io::prior_csv(prior), "t,mean_1,std_1\n0,0,1\n0.5,1,2\n");
}

TEST(Csv, TrajectoryAndWeights) {
  StateTrajectory traj{0.25, {Eigen::Vector2d(1.0, -1.0), Eigen::Vector2d(0.5, 0.125)}};
  EXPECT_EQ(io::trajectory_csv(traj), "t,x_1,x_2\n0,1,-1\n0.25,0.5,0.125\n");
  EXPECT_EQ(io::weights_csv({Eigen::Vector2d(1.0, 0.5)}), "demo,node,weight\n0,0,1\n0,1,0.5\n");
  const StateTrajectory back = io::state_trajectory_from_json(io::state_trajectory_to_json(traj));
  EXPECT_EQ(back.stacked(), traj.stacked());
}

TEST(Json, SolutionSummaryFields) {
  Solution s;
  s.objective = 1.5;
  s.iterations = 3;
  s.converged = true;
  const io::json j = io::solution_summary(s);
  for (const char* key : {"objective", "iterations", "converged", "feasible", "min_clearance"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
}

}  // namespace
}  // namespace iwsl
