#include "chetaev/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace chetaev {

std::string to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Escaped:
      return "Escaped";
    case OutcomeKind::MaxIters:
      return "MaxIters";
    case OutcomeKind::StalledOnS:
      return "StalledOnS";
  }
  return "Unknown";
}

Trajectory run(const ProblemOracle& p, const ProblemPoint& x0, const RunOptions& options) {
  if (!(options.alpha > 0.0)) throw std::invalid_argument("run: alpha must be positive");
  if (!(options.eps_escape > 0.0)) throw std::invalid_argument("run: eps_escape must be positive");
  if (x0.size() != p.dim()) throw ShapeError("run: initial point has the wrong dimension");
  const ProblemPoint& x_star = p.reference_point();
  if (distance(x0, x_star) > options.eps_escape) {
    throw std::invalid_argument("run: initial point lies outside the escape ball");
  }

  Trajectory traj;
  traj.problem_id = p.id();
  traj.dim = p.dim();
  traj.alpha = options.alpha;
  traj.eps_escape = options.eps_escape;

  ProblemPoint x = x0;
  for (std::size_t k = 0;; ++k) {
    const double d_star = distance(x, x_star);
    const double ds = p.dist_S(x);
    DenseVector v = p.subgradient(x);
    traj.records.push_back(
        StepRecord{k, x, p.objective(x), p.chetaev(x), ds, v, options.alpha});

    if (d_star > options.eps_escape) {
      traj.outcome = {OutcomeKind::Escaped, k};
      return traj;
    }
    if (ds == 0.0) {
      traj.outcome = {OutcomeKind::StalledOnS, k};
      return traj;
    }
    if (k == options.max_iters) {
      traj.outcome = {OutcomeKind::MaxIters, k};
      return traj;
    }

    std::vector<double> next(x.size());
    for (std::size_t i = 0; i < next.size(); ++i) next[i] = x[i] - options.alpha * v[i];
    if (!all_finite(next)) {
      traj.outcome = {OutcomeKind::MaxIters, k};
      throw NumericalBlowupError("run: non-finite iterate at k = " + std::to_string(k + 1),
                                 std::move(traj));
    }
    x = DenseVector(std::move(next));
  }
}

InitialPoint sample_initial(const ProblemOracle& p, double rel_radius, Rng& rng) {
  if (!(rel_radius >= 0.0)) throw std::invalid_argument("sample_initial: negative radius");
  const ProblemPoint& x_star = p.reference_point();
  const double scale = norm2(x_star);
  const bool absolute = scale == 0.0;
  const double radius = absolute ? rel_radius : rel_radius * scale;
  if (radius == 0.0) return {x_star, absolute};
  return {rng.in_ball(x_star, radius), absolute};
}

double sample_alpha(double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(lo <= hi)) {
    throw std::invalid_argument("sample_alpha: need 0 < lo <= hi");
  }
  return rng.uniform(lo, hi);
}

}  // namespace chetaev
