#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "chetaev/errors.hpp"
#include "chetaev/experiment.hpp"
#include "chetaev/format.hpp"
#include "chetaev/trajectory_csv.hpp"

namespace fs = std::filesystem;

namespace chetaev {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("chetaev_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

ExperimentConfig relu_config(const fs::path& out) {
  ExperimentConfig c;
  c.problem.id = "relu-l1";
  c.trials = 5;
  c.seed = 17;
  c.out_dir = out;
  return c;
}

TEST(Config, DefaultsPerProblem) {
  const ExperimentConfig relu = resolve_config({}, *make_problem(ProblemSpec{"relu-l1"}));
  EXPECT_EQ(*relu.alpha_lo, 0.05);
  EXPECT_EQ(*relu.alpha_hi, 0.15);
  EXPECT_EQ(*relu.eps_escape, 0.5);
  const auto rpca = make_problem(ProblemSpec{"rpca"});
  const ExperimentConfig rc = resolve_config({}, *rpca);
  EXPECT_EQ(*rc.alpha_lo, 0.001);
  EXPECT_EQ(*rc.alpha_hi, 0.01);
  EXPECT_EQ(*rc.eps_escape, rpca->neighborhood_radius());
}

TEST(Config, Validation) {
  const auto p = make_problem(ProblemSpec{"relu-l1"});
  ExperimentConfig c;
  c.alpha_lo = 0.2;
  c.alpha_hi = 0.1;
  EXPECT_THROW(resolve_config(c, *p), ConfigError);
  c = {};
  c.trials = 0;
  EXPECT_THROW(resolve_config(c, *p), ConfigError);
  c = {};
  c.rel_init_radius = 0.0;
  EXPECT_THROW(resolve_config(c, *p), ConfigError);
  c = {};
  c.alpha_lo = -1.0;
  EXPECT_THROW(resolve_config(c, *p), ConfigError);
}

TEST(Config, TextFormat) {
  ExperimentConfig c;
  std::istringstream in(
      "# escape runs\n"
      "problem = rpca\n"
      "rank = 2\n"
      "trials = 7   # inline comment\n"
      "alpha_lo = 2.5e-5\n"
      "alpha_hi = 7.5e-5\n"
      "seed = 18446744073709551615\n"
      "out_dir = /tmp/x\n");
  apply_config_text(c, in);
  EXPECT_EQ(c.problem.id, "rpca");
  EXPECT_EQ(c.trials, 7u);
  EXPECT_EQ(*c.alpha_lo, 2.5e-5);
  EXPECT_EQ(*c.alpha_hi, 7.5e-5);
  EXPECT_EQ(c.seed, 18446744073709551615ull);
  EXPECT_EQ(*c.out_dir, fs::path("/tmp/x"));

  std::istringstream unknown("speed = 3\n");
  EXPECT_THROW(apply_config_text(c, unknown), ConfigError);
  std::istringstream bad("trials = many\n");
  EXPECT_THROW(apply_config_text(c, bad), ConfigError);
  std::istringstream no_eq("trials 3\n");
  EXPECT_THROW(apply_config_text(c, no_eq), ConfigError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/cfg"), IoError);
}

TEST(Experiment, ReluDefaultsAllEscape) {
  TempDir dir;
  const auto p = make_problem(ProblemSpec{"relu-l1"});
  const SweepSummary s = run_experiment(relu_config(dir.path()), *p);
  ASSERT_EQ(s.trials.size(), 5u);
  EXPECT_EQ(s.escaped(), 5u);
  EXPECT_EQ(s.escape_fraction(), 1.0);
  for (int i = 0; i < 5; ++i) {
    EXPECT_TRUE(fs::exists(dir.path() / ("trial_" + std::to_string(i) + ".csv")));
  }
  EXPECT_TRUE(fs::exists(dir.path() / "summary.csv"));
  EXPECT_EQ(count_escaped_trajectories(dir.path()), s.escaped());
}

TEST(Experiment, RpcaScaledRangeEscapes) {
  const auto p = make_problem(ProblemSpec{"rpca"});
  ExperimentConfig c;
  c.problem.id = "rpca";
  c.trials = 5;
  const SweepSummary s = run_experiment(c, *p);
  EXPECT_EQ(s.escaped(), 5u);
}

TEST(Experiment, RpcaTinyStepsAcceptedButSlow) {
  // Escape at alpha ~ 5e-5 takes millions of steps on the 8x6 instance.
  const auto p = make_problem(ProblemSpec{"rpca"});
  ExperimentConfig c;
  c.problem.id = "rpca";
  c.alpha_lo = 0.000025;
  c.alpha_hi = 0.000075;
  c.trials = 2;
  c.max_iters = 2000;
  const SweepSummary s = run_experiment(c, *p);
  for (const TrialResult& t : s.trials) {
    EXPECT_EQ(t.outcome.kind, OutcomeKind::MaxIters);
    EXPECT_GT(t.final_chetaev, 0.0);
  }
}

TEST(Experiment, AbsControlStaysPut) {
  const auto p = make_problem(ProblemSpec{"abs-control"});
  ExperimentConfig c;
  c.problem.id = "abs-control";
  c.alpha_lo = 1e-4;
  c.alpha_hi = 1e-4;
  c.max_iters = 10000;
  const SweepSummary s = run_experiment(c, *p);
  EXPECT_EQ(s.escaped(), 0u);
  for (const TrialResult& t : s.trials) EXPECT_TRUE(t.absolute_init_radius);
}

TEST(Experiment, ThreadCountDoesNotChangeOutput) {
  TempDir dir;
  const auto p = make_problem(ProblemSpec{"relu-l1"});
  ExperimentConfig a = relu_config(dir.path() / "a");
  a.threads = 1;
  ExperimentConfig b = relu_config(dir.path() / "b");
  b.threads = 4;
  run_experiment(a, *p);
  run_experiment(b, *p);
  for (const auto& entry : fs::directory_iterator(dir.path() / "a")) {
    EXPECT_EQ(slurp(entry.path()), slurp(dir.path() / "b" / entry.path().filename()))
        << entry.path().filename();
  }
}

TEST(Experiment, Sweep) {
  const auto p = make_problem(ProblemSpec{"relu-l1"});
  ExperimentConfig c;
  c.trials = 3;
  const auto points = run_sweep(c, *p, 3);
  ASSERT_EQ(points.size(), 3u);
  EXPECT_EQ(points.front().alpha, 0.05);
  EXPECT_EQ(points.back().alpha, 0.15);
  for (const SweepPoint& s : points) {
    EXPECT_EQ(s.trials, 3u);
    EXPECT_EQ(s.escaped, 3u);
    EXPECT_GT(s.mean_escape_iteration, 0.0);
  }
  std::ostringstream out;
  write_sweep_csv(out, points);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "alpha,trials,escaped,escape_fraction,mean_escape_iteration");
  EXPECT_THROW(run_sweep(c, *p, 0), ConfigError);
}

// ---------------------------------------------------------------- trajectory CSV

TEST(TrajectoryCsv, RoundTripAndReplay) {
  const ReluL1Problem p;
  const Trajectory t = run(p, DenseVector{1, 1, 1e-3}, {0.1, 0.5, 1000});
  std::stringstream s;
  write_trajectory_csv(s, t, p.reference_point());
  const TrajectoryTable table = parse_trajectory_csv(s);
  ASSERT_EQ(table.rows.size(), t.records.size());
  EXPECT_TRUE(table.has_coordinates);
  EXPECT_TRUE(table.rows.back().escaped);
  for (std::size_t k = 0; k < t.records.size(); ++k) {
    EXPECT_EQ(DenseVector(table.rows[k].coords), t.records[k].x);
  }
  const ReplayResult r = replay(p, table);
  EXPECT_EQ(r.verdict, Verdict::Satisfied);
  EXPECT_FALSE(r.failing_row.has_value());
}

TEST(TrajectoryCsv, PerturbedEntryFailsAtThatRow) {
  const ReluL1Problem p;
  const Trajectory t = run(p, DenseVector{1, 1, 1e-3}, {0.1, 0.5, 1000});
  std::stringstream s;
  write_trajectory_csv(s, t, p.reference_point());
  TrajectoryTable table = parse_trajectory_csv(s);
  table.rows[4].coords[1] = std::nextafter(table.rows[4].coords[1], 2.0);
  const ReplayResult r = replay(p, table);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  ASSERT_TRUE(r.failing_row.has_value());
  EXPECT_EQ(*r.failing_row, 4u);
}

TEST(TrajectoryCsv, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(parse_trajectory_csv(empty), MalformedInputError);
  std::istringstream header_only("k,alpha,f,C,dS,escaped,x0\n");
  EXPECT_THROW(parse_trajectory_csv(header_only), MalformedInputError);
  std::istringstream ragged("k,alpha,f,C,dS,escaped,x0\n0,0.1,1,0,0\n");
  EXPECT_THROW(parse_trajectory_csv(ragged), MalformedInputError);
  std::istringstream bad_flag("k,alpha,f,C,dS,escaped,x0\n0,0.1,1,0,0,2,1\n");
  EXPECT_THROW(parse_trajectory_csv(bad_flag), MalformedInputError);

  const ReluL1Problem relu;
  const Trajectory t = run(relu, DenseVector{1, 1, 1e-3}, {0.1, 0.5, 10});
  std::stringstream s;
  write_trajectory_csv(s, t, relu.reference_point());
  const TrajectoryTable table = parse_trajectory_csv(s);
  EXPECT_THROW(replay(AbsControlProblem{}, table), MismatchError);
}

TEST(TrajectoryCsv, HighDimensionElidesCoordinates) {
  const RpcaL1Problem p = build_spurious_min(synthetic_rpca_matrix(8, 6, 2, 2024), 2);
  Rng rng(1);
  const Trajectory t = run(p, sample_initial(p, 1e-3, rng).x, {0.005, 0.0625, 1000});
  std::stringstream s;
  write_trajectory_csv(s, t, p.reference_point());
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "k,alpha,f,C,dS,escaped,norm_x_minus_xstar");
  const TrajectoryTable table = parse_trajectory_csv(s);
  EXPECT_FALSE(table.has_coordinates);
  EXPECT_THROW(replay(p, table), MismatchError);
}

// ---------------------------------------------------------------- CLI

class Cli : public ::testing::Test {
 protected:
  int run_cli(const std::string& args) {
    const char* exe = std::getenv("CHETAEV_CLI");
    if (exe == nullptr) return -1;
    const std::string cmd = std::string(exe) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  }
  void SetUp() override {
    if (std::getenv("CHETAEV_CLI") == nullptr) GTEST_SKIP() << "CHETAEV_CLI not set";
  }
};

TEST_F(Cli, RunReplayAndExitCodes) {
  TempDir dir;
  const std::string out = (dir.path() / "run").string();
  EXPECT_EQ(run_cli("run --problem relu-l1 --trials 3 --seed 5 --out-dir " + out), 0);
  EXPECT_TRUE(fs::exists(fs::path(out) / "summary.txt"));
  const std::string csv = (fs::path(out) / "trial_0.csv").string();
  EXPECT_EQ(run_cli("replay --problem relu-l1 " + csv), 0);

  // Perturb the x1 coordinate on data row 3.
  std::istringstream lines(slurp(csv));
  std::ostringstream edited;
  std::string line;
  for (int row = 0; std::getline(lines, line); ++row) {
    if (row == 4) {
      const auto last = line.rfind(',');
      const auto prev = line.rfind(',', last - 1);
      const double x1 = parse_double(line.substr(prev + 1, last - prev - 1));
      line = line.substr(0, prev + 1) + format_double(x1 + 1e-9) + line.substr(last);
    }
    edited << line << '\n';
  }
  const fs::path bad = dir.path() / "bad.csv";
  std::ofstream(bad) << edited.str();
  EXPECT_EQ(run_cli("replay --problem relu-l1 " + bad.string()), 4);

  const fs::path empty = dir.path() / "empty.csv";
  std::ofstream(empty).close();
  EXPECT_EQ(run_cli("replay --problem relu-l1 " + empty.string()), 5);
  EXPECT_EQ(run_cli("replay --problem relu-l1 /nonexistent.csv"), 3);
  EXPECT_EQ(run_cli("run --problem nope --out-dir " + out), 2);
  EXPECT_EQ(run_cli("run --problem rpca --matrix /nonexistent/m.csv --out-dir " + out), 3);
  EXPECT_EQ(run_cli("certify relu-l1 bogus --out-dir " + out), 2);
}

TEST_F(Cli, CertifyWritesReports) {
  TempDir dir;
  const fs::path out = dir.path() / "rep";
  EXPECT_EQ(run_cli("certify verdier-fail verdier --samples 700 --out-dir " + out.string()), 0);
  std::ifstream in(out / "verdier.report");
  const CertificateReport r = parse_report(in);
  EXPECT_EQ(r.verdict, Verdict::Violated);
  EXPECT_FALSE(r.witnesses.empty());
}

TEST_F(Cli, ConfigFileFromEnvironment) {
  TempDir dir;
  const fs::path cfg = dir.path() / "exp.cfg";
  const fs::path out = dir.path() / "out";
  std::ofstream(cfg) << "problem = relu-l1\ntrials = 2\nseed = 9\nout_dir = " << out.string()
                     << "\n";
  const std::string exe = std::getenv("CHETAEV_CLI");
  const std::string cmd = "CHETAEV_CONFIG=" + cfg.string() + " " + exe + " run > /dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(out / "trial_1.csv"));
  EXPECT_FALSE(fs::exists(out / "trial_2.csv"));
}

}  // namespace
}  // namespace chetaev
