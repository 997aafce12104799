#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "chetaev/errors.hpp"
#include "chetaev/problem.hpp"
#include "chetaev/rng.hpp"

namespace chetaev {

struct StepRecord {
  std::size_t k;
  ProblemPoint x;
  double f;
  double chetaev;
  double dist_S;
  /// Selection used for the step leaving x (also evaluated at the final iterate).
  DenseVector v;
  double alpha;
};

enum class OutcomeKind { Escaped, MaxIters, StalledOnS };

struct Outcome {
  OutcomeKind kind;
  /// Index of the iterate that triggered the outcome.
  std::size_t k;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

std::string to_string(OutcomeKind kind);

struct Trajectory {
  std::string problem_id;
  std::size_t dim = 0;
  double alpha = 0.0;
  double eps_escape = 0.0;
  std::vector<StepRecord> records;
  Outcome outcome{OutcomeKind::MaxIters, 0};
};

/// Raised when an iterate stops being finite; carries every record up to the
/// last finite iterate.
class NumericalBlowupError : public Error {
 public:
  NumericalBlowupError(const std::string& what, Trajectory partial)
      : Error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

struct RunOptions {
  double alpha;
  double eps_escape;
  std::size_t max_iters = 100000;
};

/// Constant-step subgradient method x_{k+1} = x_k - alpha v_k from x0.
/// Stops when ||x_k - x*|| > eps_escape (Escaped), when dist_S(x_k) == 0
/// (StalledOnS), or after max_iters steps (MaxIters).
Trajectory run(const ProblemOracle& p, const ProblemPoint& x0, const RunOptions& options);

struct InitialPoint {
  ProblemPoint x;
  /// Set when ||x*|| = 0 and the radius was taken as absolute.
  bool absolute_radius;
};

/// Uniform point in the ball of radius rel_radius * ||x*|| around x*.
InitialPoint sample_initial(const ProblemOracle& p, double rel_radius, Rng& rng);

/// Uniform step size in [lo, hi].
double sample_alpha(double lo, double hi, Rng& rng);

}  // namespace chetaev
