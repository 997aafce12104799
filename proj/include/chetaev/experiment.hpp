#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chetaev/dynamics.hpp"
#include "chetaev/problems.hpp"

namespace chetaev {

/// Batch configuration. Unset optionals take per-problem defaults in
/// resolve_config().
struct ExperimentConfig {
  ProblemSpec problem{"relu-l1"};
  std::size_t trials = 5;
  std::optional<double> alpha_lo;
  std::optional<double> alpha_hi;
  double rel_init_radius = 1e-3;
  std::optional<double> eps_escape;
  std::size_t max_iters = 100000;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> out_dir;
  /// Worker threads; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Step-size range and escape radius used when a config leaves them unset.
struct ProblemDefaults {
  double alpha_lo;
  double alpha_hi;
  double eps_escape;
};

ProblemDefaults problem_defaults(const ProblemOracle& p);

/// Fills unset fields from problem_defaults() and validates the result.
/// Throws ConfigError.
ExperimentConfig resolve_config(ExperimentConfig config, const ProblemOracle& p);

/// Applies `key = value` lines ('#' starts a comment) on top of `config`.
/// Throws ConfigError for unknown keys or bad values.
void apply_config_text(ExperimentConfig& config, std::istream& in);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

struct TrialResult {
  std::size_t trial;
  double alpha;
  Outcome outcome;
  double final_chetaev;
  double final_dist_S;
  double final_dist_to_star;
  bool absolute_init_radius;
};

struct SweepSummary {
  std::string problem_id;
  std::vector<TrialResult> trials;

  std::size_t escaped() const;
  double escape_fraction() const;
};

/// Runs config.trials independent trials in parallel. Trial i draws its step
/// size and then its initial point from the stream derive_seed(seed, i), so
/// results do not depend on the thread count. When out_dir is set, writes
/// trial_<i>.csv per trial plus summary.csv and summary.txt.
SweepSummary run_experiment(const ExperimentConfig& config, const ProblemOracle& p);

void write_summary(const std::filesystem::path& dir, const SweepSummary& summary);

/// Number of trial_*.csv files in dir whose final row is marked escaped.
std::size_t count_escaped_trajectories(const std::filesystem::path& dir);

struct SweepPoint {
  double alpha;
  std::size_t trials;
  std::size_t escaped;
  /// Mean escape iteration over escaped trials (0 when none escaped).
  double mean_escape_iteration;
};

/// Grid of `steps` equally spaced step sizes over [alpha_lo, alpha_hi]; each
/// grid point runs config.trials trials with that fixed step size.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& config, const ProblemOracle& p,
                                  std::size_t steps);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points);

}  // namespace chetaev
