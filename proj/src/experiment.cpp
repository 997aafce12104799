#include "chetaev/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

#include "chetaev/errors.hpp"
#include "chetaev/format.hpp"
#include "chetaev/trajectory_csv.hpp"

namespace chetaev {

namespace {

std::size_t parse_size(const std::string& key, std::string_view text) {
  const double v = parse_double(text);
  if (v < 0.0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t v = 0;
  const std::string s(trim(text));
  try {
    std::size_t used = 0;
    v = std::stoull(s, &used);
    if (used != s.size()) throw ConfigError("config: bad seed '" + s + "'");
  } catch (const std::logic_error&) {
    throw ConfigError("config: bad seed '" + s + "'");
  }
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

ProblemDefaults problem_defaults(const ProblemOracle& p) {
  const std::string id = p.id();
  if (id == "rpca") return {0.001, 0.01, p.neighborhood_radius()};
  if (id == "abs-control") return {1e-5, 1e-4, 0.5};
  if (id == "verdier-fail") return {0.01, 0.05, 0.25};
  return {0.05, 0.15, 0.5};
}

ExperimentConfig resolve_config(ExperimentConfig config, const ProblemOracle& p) {
  const ProblemDefaults d = problem_defaults(p);
  if (!config.alpha_lo) config.alpha_lo = config.alpha_hi ? std::min(d.alpha_lo, *config.alpha_hi) : d.alpha_lo;
  if (!config.alpha_hi) config.alpha_hi = std::max(d.alpha_hi, *config.alpha_lo);
  if (!config.eps_escape) config.eps_escape = d.eps_escape;

  if (!(*config.alpha_lo > 0.0) || !(*config.alpha_lo <= *config.alpha_hi)) {
    throw ConfigError("config: need 0 < alpha_lo <= alpha_hi");
  }
  if (config.trials < 1) throw ConfigError("config: trials must be at least 1");
  if (!(config.rel_init_radius > 0.0)) throw ConfigError("config: init_rel_radius must be positive");
  if (!(*config.eps_escape > 0.0)) throw ConfigError("config: escape_radius must be positive");
  const double x_star_norm = norm2(p.reference_point());
  const double init_radius =
      x_star_norm > 0.0 ? config.rel_init_radius * x_star_norm : config.rel_init_radius;
  if (init_radius > *config.eps_escape) {
    throw ConfigError("config: initialization ball is larger than the escape ball");
  }
  return config;
}

void apply_config_text(ExperimentConfig& config, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    if (trim(body).empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));
    try {
      if (key == "problem") {
        config.problem.id = std::string(value);
      } else if (key == "matrix") {
        config.problem.matrix = std::filesystem::path(std::string(value));
      } else if (key == "rank") {
        config.problem.rank = parse_size(key, value);
      } else if (key == "synthetic_rows") {
        config.problem.synthetic_rows = parse_size(key, value);
      } else if (key == "synthetic_cols") {
        config.problem.synthetic_cols = parse_size(key, value);
      } else if (key == "matrix_seed") {
        config.problem.matrix_seed = parse_seed(value);
      } else if (key == "trials") {
        config.trials = parse_size(key, value);
      } else if (key == "alpha_lo") {
        config.alpha_lo = parse_double(value);
      } else if (key == "alpha_hi") {
        config.alpha_hi = parse_double(value);
      } else if (key == "init_rel_radius") {
        config.rel_init_radius = parse_double(value);
      } else if (key == "escape_radius") {
        config.eps_escape = parse_double(value);
      } else if (key == "max_iters") {
        config.max_iters = parse_size(key, value);
      } else if (key == "seed") {
        config.seed = parse_seed(value);
      } else if (key == "out_dir") {
        config.out_dir = std::filesystem::path(std::string(value));
      } else if (key == "threads") {
        config.threads = parse_size(key, value);
      } else {
        throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                          "'");
      }
    } catch (const MalformedInputError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  apply_config_text(config, in);
}

std::size_t SweepSummary::escaped() const {
  return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const auto& t) {
    return t.outcome.kind == OutcomeKind::Escaped;
  }));
}

double SweepSummary::escape_fraction() const {
  return trials.empty() ? 0.0
                        : static_cast<double>(escaped()) / static_cast<double>(trials.size());
}

SweepSummary run_experiment(const ExperimentConfig& raw, const ProblemOracle& p) {
  const ExperimentConfig config = resolve_config(raw, p);
  if (config.out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*config.out_dir, ec);
    if (ec) throw IoError("cannot create " + config.out_dir->string() + ": " + ec.message());
  }

  SweepSummary summary;
  summary.problem_id = p.id();
  std::vector<std::optional<TrialResult>> results(config.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= config.trials) return;
      try {
        Rng rng(derive_seed(config.seed, i));
        const double alpha = sample_alpha(*config.alpha_lo, *config.alpha_hi, rng);
        const InitialPoint init = sample_initial(p, config.rel_init_radius, rng);
        const Trajectory traj =
            run(p, init.x, RunOptions{alpha, *config.eps_escape, config.max_iters});
        if (config.out_dir) {
          std::ofstream out = open_for_write(*config.out_dir / ("trial_" + std::to_string(i) + ".csv"));
          write_trajectory_csv(out, traj, p.reference_point());
          if (!out) throw IoError("write failed for trial " + std::to_string(i));
        }
        const StepRecord& last = traj.records.back();
        results[i] = TrialResult{i,          alpha,        traj.outcome,
                                 last.chetaev, last.dist_S, distance(last.x, p.reference_point()),
                                 init.absolute_radius};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.trials);
        return;
      }
    }
  };

  std::size_t n_threads = config.threads != 0 ? config.threads
                                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, config.trials);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& r : results) summary.trials.push_back(*r);
  if (config.out_dir) write_summary(*config.out_dir, summary);
  return summary;
}

void write_summary(const std::filesystem::path& dir, const SweepSummary& summary) {
  {
    std::ofstream out = open_for_write(dir / "summary.csv");
    out << "trial,alpha,outcome,outcome_k,final_C,final_dS,final_dist\n";
    for (const TrialResult& t : summary.trials) {
      out << t.trial << ',' << format_double(t.alpha) << ',' << to_string(t.outcome.kind) << ','
          << t.outcome.k << ',' << format_double(t.final_chetaev) << ','
          << format_double(t.final_dist_S) << ',' << format_double(t.final_dist_to_star) << '\n';
    }
    if (!out) throw IoError("write failed for summary.csv");
  }
  std::ofstream out = open_for_write(dir / "summary.txt");
  out << "problem = " << summary.problem_id << '\n';
  out << "trials = " << summary.trials.size() << '\n';
  out << "escaped = " << summary.escaped() << '\n';
  out << "escape_fraction = " << format_double(summary.escape_fraction()) << '\n';
  const bool absolute = std::any_of(summary.trials.begin(), summary.trials.end(),
                                    [](const auto& t) { return t.absolute_init_radius; });
  if (absolute) out << "note = x* is the origin; init radius taken as absolute\n";
  if (!out) throw IoError("write failed for summary.txt");
}

std::size_t count_escaped_trajectories(const std::filesystem::path& dir) {
  std::size_t escaped = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with("trial_") || entry.path().extension() != ".csv") continue;
    std::ifstream in(entry.path());
    if (!in) throw IoError("cannot read " + entry.path().string());
    const TrajectoryTable table = parse_trajectory_csv(in);
    if (table.rows.back().escaped) ++escaped;
  }
  return escaped;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& raw, const ProblemOracle& p,
                                  std::size_t steps) {
  if (steps < 1) throw ConfigError("sweep: need at least one grid point");
  const ExperimentConfig config = resolve_config(raw, p);
  std::vector<SweepPoint> out;
  for (std::size_t g = 0; g < steps; ++g) {
    const double t = steps == 1 ? 0.0 : static_cast<double>(g) / static_cast<double>(steps - 1);
    const double alpha = *config.alpha_lo + t * (*config.alpha_hi - *config.alpha_lo);
    ExperimentConfig point = config;
    point.alpha_lo = alpha;
    point.alpha_hi = alpha;
    point.seed = derive_seed(config.seed, g);
    point.out_dir.reset();
    const SweepSummary s = run_experiment(point, p);
    double total_k = 0.0;
    for (const TrialResult& tr : s.trials) {
      if (tr.outcome.kind == OutcomeKind::Escaped) total_k += static_cast<double>(tr.outcome.k);
    }
    const std::size_t esc = s.escaped();
    out.push_back({alpha, s.trials.size(), esc, esc == 0 ? 0.0 : total_k / static_cast<double>(esc)});
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "alpha,trials,escaped,escape_fraction,mean_escape_iteration\n";
  for (const SweepPoint& s : points) {
    out << format_double(s.alpha) << ',' << s.trials << ',' << s.escaped << ','
        << format_double(static_cast<double>(s.escaped) / static_cast<double>(s.trials)) << ','
        << format_double(s.mean_escape_iteration) << '\n';
  }
}

}  // namespace chetaev
