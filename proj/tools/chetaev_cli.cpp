// chetaev: simulate the constant-step subgradient method near spurious local
// minima and audit the instability hypotheses.
//
// Exit codes: 0 ok, 1 internal error, 2 config error, 3 IO error,
// 4 replay found a violation, 5 malformed input or bad problem data.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chetaev/certifiers.hpp"
#include "chetaev/experiment.hpp"
#include "chetaev/format.hpp"
#include "chetaev/trajectory_csv.hpp"

namespace {

using namespace chetaev;

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitViolation = 4;
constexpr int kExitMalformed = 5;

// Flags shared by every subcommand that builds a problem or runs trials.
struct Flags {
  std::optional<std::string> problem;
  std::optional<std::string> matrix;
  std::optional<std::size_t> rank;
  std::optional<std::size_t> synthetic_rows;
  std::optional<std::size_t> synthetic_cols;
  std::optional<std::uint64_t> matrix_seed;
  std::optional<std::size_t> trials;
  std::optional<double> alpha_lo;
  std::optional<double> alpha_hi;
  std::optional<double> init_rel_radius;
  std::optional<double> escape_radius;
  std::optional<std::size_t> max_iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::string> config;
};

void add_problem_flags(CLI::App* app, Flags& f, bool with_problem) {
  if (with_problem) app->add_option("--problem", f.problem, "Problem id");
  app->add_option("--matrix", f.matrix, "rpca: data matrix CSV");
  app->add_option("--rank", f.rank, "rpca: factor rank r");
  app->add_option("--synthetic-rows", f.synthetic_rows, "rpca: rows of the synthetic matrix");
  app->add_option("--synthetic-cols", f.synthetic_cols, "rpca: columns of the synthetic matrix");
  app->add_option("--matrix-seed", f.matrix_seed, "rpca: seed of the synthetic matrix");
  app->add_option("--config", f.config, "key = value config file (else $CHETAEV_CONFIG)");
}

void add_trial_flags(CLI::App* app, Flags& f) {
  app->add_option("--trials", f.trials, "Number of trials");
  app->add_option("--alpha-lo", f.alpha_lo, "Smallest step size");
  app->add_option("--alpha-hi", f.alpha_hi, "Largest step size");
  app->add_option("--init-rel-radius", f.init_rel_radius, "Initialization radius relative to ||x*||");
  app->add_option("--escape-radius", f.escape_radius, "Escape radius around x*");
  app->add_option("--max-iters", f.max_iters, "Iteration cap per trial");
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--out-dir", f.out_dir, "Output directory");
  app->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
}

// Defaults, then the config file, then explicit flags.
ExperimentConfig build_config(const Flags& f) {
  ExperimentConfig c;
  std::optional<std::filesystem::path> path;
  if (f.config) {
    path = *f.config;
  } else if (const char* env = std::getenv("CHETAEV_CONFIG"); env != nullptr && *env != '\0') {
    path = env;
  }
  if (path) apply_config_file(c, *path);

  if (f.problem) c.problem.id = *f.problem;
  if (f.matrix) c.problem.matrix = *f.matrix;
  if (f.rank) c.problem.rank = *f.rank;
  if (f.synthetic_rows) c.problem.synthetic_rows = *f.synthetic_rows;
  if (f.synthetic_cols) c.problem.synthetic_cols = *f.synthetic_cols;
  if (f.matrix_seed) c.problem.matrix_seed = *f.matrix_seed;
  if (f.trials) c.trials = *f.trials;
  if (f.alpha_lo) c.alpha_lo = *f.alpha_lo;
  if (f.alpha_hi) c.alpha_hi = *f.alpha_hi;
  if (f.init_rel_radius) c.rel_init_radius = *f.init_rel_radius;
  if (f.escape_radius) c.eps_escape = *f.escape_radius;
  if (f.max_iters) c.max_iters = *f.max_iters;
  if (f.seed) c.seed = *f.seed;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.threads) c.threads = *f.threads;
  return c;
}

int cmd_run(const Flags& f) {
  ExperimentConfig config = build_config(f);
  if (!config.out_dir) config.out_dir = "out";
  const auto p = make_problem(config.problem);
  const SweepSummary s = run_experiment(config, *p);
  for (const TrialResult& t : s.trials) {
    std::cout << "trial " << t.trial << ": alpha=" << format_double(t.alpha) << ' '
              << to_string(t.outcome.kind) << " at k=" << t.outcome.k
              << " C=" << format_double(t.final_chetaev) << '\n';
  }
  std::cout << s.escaped() << '/' << s.trials.size() << " escaped; wrote "
            << config.out_dir->string() << '\n';
  return 0;
}

int cmd_sweep(const Flags& f, std::size_t steps) {
  const ExperimentConfig config = build_config(f);
  const auto p = make_problem(config.problem);
  const auto points = run_sweep(config, *p, steps);
  if (config.out_dir) {
    std::filesystem::create_directories(*config.out_dir);
    const auto path = *config.out_dir / "sweep.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_sweep_csv(out, points);
    if (!out) throw IoError("write failed for " + path.string());
  }
  write_sweep_csv(std::cout, points);
  return 0;
}

Trajectory audit_trajectory(const ProblemOracle& p, const ExperimentConfig& raw,
                            std::optional<double> alpha) {
  const ExperimentConfig config = resolve_config(raw, p);
  Rng rng(derive_seed(config.seed, 0));
  const double a = alpha ? *alpha : 0.5 * (*config.alpha_lo + *config.alpha_hi);
  const InitialPoint init = sample_initial(p, config.rel_init_radius, rng);
  return run(p, init.x, RunOptions{a, *config.eps_escape, config.max_iters});
}

int cmd_certify(Flags f, const std::string& problem, const std::vector<std::string>& names,
                std::size_t samples, std::optional<double> alpha,
                std::optional<double> threshold, std::optional<double> c3) {
  f.problem = problem;
  const ExperimentConfig config = build_config(f);
  const std::uint64_t seed = config.seed;
  const std::filesystem::path out_dir = config.out_dir ? *config.out_dir : "reports";
  const auto p = make_problem(config.problem);

  for (const std::string& name : names) {
    if (name != "subregularity" && name != "verdier" && name != "local-min" &&
        name != "chetaev" && name != "monotonicity" && name != "projection-ratio") {
      throw ConfigError("unknown certifier '" + name + "'");
    }
  }

  std::optional<Trajectory> traj;
  auto trajectory = [&]() -> const Trajectory& {
    if (!traj) traj = audit_trajectory(*p, config, alpha);
    return *traj;
  };

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  for (const std::string& name : names) {
    CertificateReport r;
    if (name == "subregularity") {
      r = certify_subregularity(*p, samples, seed);
    } else if (name == "verdier") {
      r = certify_verdier(*p, samples, seed);
    } else if (name == "local-min") {
      r = probe_local_min(*p, samples, seed);
    } else if (name == "chetaev") {
      r = audit_chetaev(*p, trajectory());
    } else if (name == "monotonicity") {
      const Trajectory& t = trajectory();
      r = audit_distance_monotonicity(*p, t, threshold ? *threshold : t.alpha / 4.0);
    } else {
      double bound = 0.0;
      if (c3) {
        bound = *c3;
      } else {
        const CertificateReport v = certify_verdier(*p, samples, seed);
        if (!v.constant) {
          throw ConfigError("projection-ratio: no Verdier constant available; pass --c3");
        }
        bound = *v.constant;
      }
      r = audit_projection_ratio(*p, trajectory(), bound);
    }
    const auto path = out_dir / (name + ".report");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    write_report(out, r);
    if (!out) throw IoError("write failed for " + path.string());
    std::cout << name << ": " << to_string(r.verdict) << ' ' << r.statistic_name << '='
              << format_double(r.statistic) << '\n';
  }
  return 0;
}

int cmd_replay(Flags f, const std::string& csv) {
  const ExperimentConfig config = build_config(f);
  const auto p = make_problem(config.problem);
  std::ifstream in(csv);
  if (!in) throw IoError("cannot open " + csv);
  const ReplayResult r = replay(*p, parse_trajectory_csv(in));
  std::cout << to_string(r.verdict);
  if (r.failing_row) std::cout << " at row " << *r.failing_row;
  std::cout << '\n';
  if (r.chetaev.verdict == Verdict::Violated && r.chetaev.failing_step) {
    std::cout << "chetaev increment fails at step " << *r.chetaev.failing_step << '\n';
  }
  return r.verdict == Verdict::Violated ? kExitViolation : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgradient escape from spurious local minima"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run_cmd = app.add_subcommand("run", "Run randomly initialized trials");
  add_problem_flags(run_cmd, run_flags, true);
  add_trial_flags(run_cmd, run_flags);

  Flags sweep_flags;
  std::size_t sweep_steps = 5;
  auto* sweep_cmd = app.add_subcommand("sweep", "Escape statistics over a step-size grid");
  add_problem_flags(sweep_cmd, sweep_flags, true);
  add_trial_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--alpha-steps", sweep_steps, "Grid points over [alpha-lo, alpha-hi]");

  Flags cert_flags;
  std::string cert_problem;
  std::vector<std::string> cert_names;
  std::size_t cert_samples = 10000;
  std::optional<double> cert_alpha;
  std::optional<double> cert_threshold;
  std::optional<double> cert_c3;
  auto* cert_cmd = app.add_subcommand("certify", "Run certifiers and write report files");
  cert_cmd->add_option("problem", cert_problem, "Problem id")->required();
  cert_cmd->add_option("certifiers", cert_names,
                       "subregularity, verdier, local-min, chetaev, monotonicity, "
                       "projection-ratio")
      ->required();
  add_problem_flags(cert_cmd, cert_flags, false);
  add_trial_flags(cert_cmd, cert_flags);
  cert_cmd->add_option("--samples", cert_samples, "Samples per sampling certifier");
  cert_cmd->add_option("--alpha", cert_alpha, "Step size of the audited trajectory");
  cert_cmd->add_option("--threshold", cert_threshold, "monotonicity: distance threshold");
  cert_cmd->add_option("--c3", cert_c3, "projection-ratio: Verdier constant");

  Flags replay_flags;
  std::string replay_csv;
  auto* replay_cmd = app.add_subcommand("replay", "Re-verify a trajectory CSV");
  replay_cmd->add_option("csv", replay_csv, "Trajectory CSV")->required();
  add_problem_flags(replay_cmd, replay_flags, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, sweep_steps);
    if (*cert_cmd) {
      return cmd_certify(cert_flags, cert_problem, cert_names, cert_samples, cert_alpha,
                         cert_threshold, cert_c3);
    }
    if (*replay_cmd) return cmd_replay(replay_flags, replay_csv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const MalformedInputError& e) {
    std::cerr << "malformed input: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const ConstructionError& e) {
    std::cerr << "bad problem data: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const MismatchError& e) {
    std::cerr << "mismatch: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
