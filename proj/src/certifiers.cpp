#include "chetaev/certifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chetaev/errors.hpp"
#include "chetaev/format.hpp"
#include "chetaev/rng.hpp"

namespace chetaev {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kSubregularityLevels = 40;
constexpr std::size_t kVerdierRadiusGrid = 240;  // radii (rho - s) 2^(-k/8)
constexpr double kLocalMinTol = 1e-12;

void require_samples(std::size_t n, std::size_t minimum, const char* who) {
  if (n < minimum) {
    throw std::invalid_argument(std::string(who) + ": need at least " + std::to_string(minimum) +
                                " samples");
  }
}

void require_same_problem(const ProblemOracle& p, const Trajectory& traj, const char* who) {
  if (traj.problem_id != p.id() || traj.dim != p.dim()) {
    throw MismatchError(std::string(who) + ": trajectory of '" + traj.problem_id +
                        "' checked against problem '" + p.id() + "'");
  }
}

ProblemPoint on_sphere(const ProblemPoint& center, double radius, Rng& rng) {
  return axpy(radius, rng.unit_direction(center.size()), center);
}

// Decimal label for a power of ten, e.g. 1e-4.
std::string scale_label(double s) {
  return "1e" + std::to_string(static_cast<int>(std::lround(std::log10(s))));
}

struct InUStep {
  const StepRecord* now;
  const StepRecord* next;
};

// Steps with both iterates in U \ S.
std::vector<InUStep> local_steps(const ProblemOracle& p, const Trajectory& traj,
                                 std::size_t* skipped) {
  std::vector<InUStep> out;
  *skipped = 0;
  for (std::size_t k = 0; k + 1 < traj.records.size(); ++k) {
    const StepRecord& a = traj.records[k];
    const StepRecord& b = traj.records[k + 1];
    if (p.in_neighborhood(a.x) && p.in_neighborhood(b.x) && a.dist_S > 0.0 && b.dist_S > 0.0) {
      out.push_back({&a, &b});
    } else {
      ++*skipped;
    }
  }
  return out;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied:
      return "Satisfied";
    case Verdict::Violated:
      return "Violated";
    case Verdict::BoundedBelowRegime:
      return "BoundedBelowRegime";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

Verdict parse_verdict(const std::string& text) {
  for (Verdict v : {Verdict::Satisfied, Verdict::Violated, Verdict::BoundedBelowRegime,
                    Verdict::Inconclusive}) {
    if (to_string(v) == text) return v;
  }
  throw MalformedInputError("unknown verdict '" + text + "'");
}

// ---------------------------------------------------------------------------
// Subregularity

CertificateReport certify_subregularity(const ProblemOracle& p, std::size_t n_samples,
                                        std::uint64_t seed) {
  require_samples(n_samples, 100, "certify_subregularity");
  CertificateReport rep;
  rep.name = "subregularity";
  rep.problem_id = p.id();
  rep.samples = n_samples;
  rep.notes.push_back("d(0, df(x)) approximated by the norm of the oracle's subgradient selection");

  struct Sample {
    double d;
    double g;
    std::size_t index;
  };
  std::vector<Sample> kept;
  std::vector<ProblemPoint> points;
  const double rho = p.neighborhood_radius();
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    const double r = std::ldexp(rho, -static_cast<int>(i % kSubregularityLevels));
    ProblemPoint x = on_sphere(p.reference_point(), r, rng);
    const double d = p.dist_S(x);
    if (d == 0.0) {
      ++rep.skipped;
      continue;
    }
    const double g = norm2(p.subgradient(x));
    if (g == 0.0) {
      // Stationary selection off S: no finite c satisfies the bound here.
      rep.verdict = Verdict::Violated;
      rep.statistic_name = "max_dist_over_grad_norm";
      rep.statistic = kInf;
      rep.witnesses = {x};
      rep.checked = kept.size() + 1;
      rep.notes.push_back("zero subgradient selection at a point off S");
      return rep;
    }
    kept.push_back({d, g, points.size()});
    points.push_back(std::move(x));
  }
  rep.checked = kept.size();
  if (kept.empty()) {
    rep.verdict = Verdict::Inconclusive;
    rep.statistic_name = "max_dist_over_grad_norm";
    rep.statistic = 0.0;
    rep.notes.push_back("every sample lies on S");
    return rep;
  }

  const double count = static_cast<double>(kept.size());
  double mean_ld = 0.0;
  double mean_lg = 0.0;
  for (const Sample& s : kept) {
    mean_ld += std::log(s.d);
    mean_lg += std::log(s.g);
  }
  mean_ld /= count;
  mean_lg /= count;
  double var_ld = 0.0;
  double var_lg = 0.0;
  double cov = 0.0;
  for (const Sample& s : kept) {
    const double a = std::log(s.d) - mean_ld;
    const double b = std::log(s.g) - mean_lg;
    var_ld += a * a;
    var_lg += b * b;
    cov += a * b;
  }
  var_ld /= count;
  var_lg /= count;
  cov /= count;

  double min_g = kInf;
  for (const Sample& s : kept) min_g = std::min(min_g, s.g);
  rep.extras["min_grad_norm"] = min_g;
  rep.extras["log_grad_norm_variance"] = var_lg;

  const double slope = var_ld > 0.0 ? cov / var_ld : 0.0;
  rep.extras["log_log_slope"] = slope;

  auto envelope = [&](double theta) {
    double best = -kInf;
    std::size_t arg = 0;
    for (const Sample& s : kept) {
      const double ratio = s.d / std::pow(s.g, theta);
      if (ratio > best) {
        best = ratio;
        arg = s.index;
      }
    }
    return std::pair{best, arg};
  };

  if (var_lg < 1e-6 || std::abs(slope) < 0.05) {
    const auto [c2, arg] = envelope(1.0);
    rep.verdict = Verdict::BoundedBelowRegime;
    rep.statistic_name = "max_dist_over_grad_norm";
    rep.statistic = c2;
    rep.constant = c2;
    rep.witnesses = {points[arg]};
    rep.extras["theta"] = 1.0;
    rep.notes.push_back(
        "subgradient norms bounded below off S: theta-subregularity holds for theta = 1 with "
        "the reported constant, and for every theta > 1 near x*");
    return rep;
  }

  const double theta = cov / var_lg;
  const double c_fit = std::exp(mean_ld - theta * mean_lg);
  const auto [c_env, arg] = envelope(theta);
  rep.statistic_name = "max_dist_over_grad_norm_pow_theta";
  rep.statistic = c_env;
  rep.witnesses = {points[arg]};
  rep.extras["theta"] = theta;
  rep.extras["c_fit"] = c_fit;
  if (c_env <= 1.05 * c_fit) {
    rep.verdict = Verdict::Satisfied;
    rep.constant = c_env;
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("samples exceed the fitted power law by more than 5%");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Verdier

std::vector<double> verdier_scales() { return {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}; }

double verdier_ratio(const ProblemOracle& p, const ProblemPoint& x, const ProblemPoint& y) {
  const DenseVector t = p.tangent_project(y, p.subgradient(x));
  return distance(t, p.riemannian_grad(y)) / distance(x, y);
}

CertificateReport certify_verdier(const ProblemOracle& p, std::size_t n_samples,
                                  std::uint64_t seed) {
  require_samples(n_samples, 100, "certify_verdier");
  CertificateReport rep;
  rep.name = "verdier";
  rep.problem_id = p.id();
  rep.samples = n_samples;
  rep.statistic_name = "max_ratio";

  const std::vector<double> scales = verdier_scales();
  const std::size_t n_scales = scales.size();
  const double rho = p.neighborhood_radius();
  const ProblemPoint& x_star = p.reference_point();

  struct Best {
    double ratio = -1.0;
    std::vector<ProblemPoint> pair;
  };
  std::vector<Best> per_scale(n_scales);
  Best overall;

  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t bucket = i % n_scales;
    const std::size_t block = i / n_scales;
    const bool structured = block % 4 != 3;

    std::optional<ProblemPoint> x;
    std::optional<ProblemPoint> y;
    if (structured) {
      const double s = scales[bucket];
      const double t = static_cast<double>(block % kVerdierRadiusGrid) / 8.0;
      const double r = (rho - s) * std::exp2(-t);
      const ProblemPoint base = p.project_S(on_sphere(x_star, r, rng));
      const DenseVector w = rng.unit_direction(p.dim());
      const DenseVector normal = subtract(w, p.tangent_project(base, w));
      const double nn = norm2(normal);
      if (nn == 0.0) {
        ++rep.skipped;
        continue;
      }
      x = axpy(s / nn, normal, base);
      y = p.project_S(*x);
    } else {
      y = p.project_S(rng.in_ball(x_star, rho));
      x = rng.in_ball(x_star, rho);
    }
    if (p.dist_S(*x) == 0.0 || distance(*x, *y) == 0.0) {
      ++rep.skipped;
      continue;
    }
    ++rep.checked;
    const double ratio = verdier_ratio(p, *x, *y);
    if (structured && ratio > per_scale[bucket].ratio) {
      per_scale[bucket] = {ratio, {*x, *y}};
    }
    if (ratio > overall.ratio) overall = {ratio, {*x, *y}};
  }

  for (std::size_t d = 0; d < n_scales; ++d) {
    rep.extras["max_ratio.scale_" + scale_label(scales[d])] = std::max(per_scale[d].ratio, 0.0);
  }
  if (overall.ratio < 0.0) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("no admissible pairs were sampled");
    return rep;
  }

  auto doubles = [&](std::size_t d) {
    const double prev = std::max(per_scale[d - 1].ratio, 0.0);
    const double cur = std::max(per_scale[d].ratio, 0.0);
    return cur > 0.0 && cur >= 2.0 * prev;
  };
  bool diverging = n_scales >= 4;
  for (std::size_t d = n_scales - 3; d < n_scales && diverging; ++d) diverging = doubles(d);
  bool any_doubling = false;
  for (std::size_t d = 1; d < n_scales; ++d) any_doubling = any_doubling || doubles(d);

  if (diverging) {
    const Best& finest = per_scale.back();
    rep.verdict = Verdict::Violated;
    rep.statistic_name = "max_ratio_finest_scale";
    rep.statistic = finest.ratio;
    rep.witnesses = finest.pair;
    rep.notes.push_back("ratio at least doubles per decade over the last three decades");
    return rep;
  }
  rep.statistic = overall.ratio;
  rep.witnesses = overall.pair;
  if (!any_doubling) {
    rep.verdict = Verdict::Satisfied;
    rep.constant = overall.ratio;
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("ratio grows between some scales without a sustained trend");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Trajectory audits

CertificateReport audit_chetaev(const ProblemOracle& p, const Trajectory& traj) {
  require_same_problem(p, traj, "audit_chetaev");
  CertificateReport rep;
  rep.name = "chetaev";
  rep.problem_id = p.id();
  rep.samples = traj.records.size();
  rep.statistic_name = "min_increment_slack";
  rep.extras["alpha"] = traj.alpha;
  rep.extras["theta1"] = p.theta1();
  rep.extras["c1"] = p.c1(traj.alpha);
  if (!p.declares_chetaev()) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("problem declares no Chetaev function");
    return rep;
  }

  const std::vector<InUStep> steps = local_steps(p, traj, &rep.skipped);
  rep.checked = steps.size();
  const double c1 = p.c1(traj.alpha);
  double worst = kInf;
  rep.verdict = Verdict::Satisfied;
  for (const InUStep& s : steps) {
    const double increment = s.next->chetaev - s.now->chetaev;
    const double slack = increment - c1 * std::pow(s.now->dist_S, p.theta1());
    if (slack < worst) {
      worst = slack;
      rep.witnesses = {s.now->x, s.next->x};
    }
    if (!rep.failing_step && slack < -1e-9 * (1.0 + std::abs(s.now->chetaev))) {
      rep.failing_step = s.now->k;
      rep.verdict = Verdict::Violated;
    }
  }
  rep.statistic = worst;
  if (steps.empty()) rep.notes.push_back("no step with both iterates in U \\ S");
  return rep;
}

CertificateReport audit_distance_monotonicity(const ProblemOracle& p, const Trajectory& traj,
                                              double threshold) {
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("audit_distance_monotonicity: threshold must be positive");
  }
  require_same_problem(p, traj, "audit_distance_monotonicity");
  CertificateReport rep;
  rep.name = "monotonicity";
  rep.problem_id = p.id();
  rep.samples = traj.records.size();
  rep.statistic_name = "min_distance_gain";
  rep.extras["threshold"] = threshold;
  rep.verdict = Verdict::Satisfied;

  double worst = kInf;
  double largest_valid = kInf;
  std::size_t skipped = 0;
  for (const InUStep& s : local_steps(p, traj, &skipped)) {
    const double gain = s.next->dist_S - s.now->dist_S;
    if (gain < 0.0) largest_valid = std::min(largest_valid, s.now->dist_S);
    if (s.now->dist_S > threshold) continue;
    ++rep.checked;
    if (gain < worst) {
      worst = gain;
      rep.witnesses = {s.now->x, s.next->x};
    }
    if (gain < 0.0 && !rep.failing_step) {
      rep.failing_step = s.now->k;
      rep.verdict = Verdict::Violated;
    }
  }
  rep.skipped = traj.records.empty() ? 0 : traj.records.size() - 1 - rep.checked;
  rep.statistic = worst;
  rep.extras["largest_valid_threshold"] = largest_valid;
  return rep;
}

CertificateReport audit_projection_ratio(const ProblemOracle& p, const Trajectory& traj,
                                         double c3) {
  require_same_problem(p, traj, "audit_projection_ratio");
  CertificateReport rep;
  rep.name = "projection-ratio";
  rep.problem_id = p.id();
  rep.samples = traj.records.size();
  rep.statistic_name = "max_projection_ratio";
  const double bound = 1.0 + traj.alpha * c3;
  rep.extras["bound"] = bound;
  rep.extras["c3"] = c3;
  rep.verdict = Verdict::Satisfied;

  double worst = 0.0;
  for (const InUStep& s : local_steps(p, traj, &rep.skipped)) {
    ++rep.checked;
    const double ratio = distance(s.now->x, p.project_S(s.next->x)) / s.now->dist_S;
    if (ratio > worst || rep.witnesses.empty()) {
      worst = std::max(worst, ratio);
      rep.witnesses = {s.now->x, s.next->x};
    }
    if (ratio > bound * (1.0 + 1e-12) && !rep.failing_step) {
      rep.failing_step = s.now->k;
      rep.verdict = Verdict::Violated;
    }
  }
  rep.statistic = worst;
  return rep;
}

// ---------------------------------------------------------------------------
// Local minimality

CertificateReport probe_local_min(const ProblemOracle& p, std::size_t n_samples,
                                  std::uint64_t seed) {
  require_samples(n_samples, 1000, "probe_local_min");
  CertificateReport rep;
  rep.name = "local-min";
  rep.problem_id = p.id();
  rep.samples = n_samples;
  rep.statistic_name = "min_objective_gap";

  const ProblemPoint& x_star = p.reference_point();
  const double f_star = p.objective(x_star);
  const double rho = p.neighborhood_radius();
  rep.extras["reference_objective"] = f_star;

  double worst = kInf;
  std::size_t ties_off_s = 0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(derive_seed(seed, i));
    const ProblemPoint x =
        i % 2 == 0 ? rng.in_ball(x_star, rho)
                   : on_sphere(x_star, std::ldexp(rho, -static_cast<int>((i / 2) % 30)), rng);
    const double gap = p.objective(x) - f_star;
    if (gap < worst) {
      worst = gap;
      rep.witnesses = {x};
    }
    if (gap <= kLocalMinTol && p.dist_S(x) > 1e-9) ++ties_off_s;
  }
  rep.checked = n_samples;
  rep.statistic = worst;
  rep.extras["ties_off_S"] = static_cast<double>(ties_off_s);
  rep.verdict = worst >= -kLocalMinTol ? Verdict::Satisfied : Verdict::Violated;

  if (const auto lower = p.lower_witness()) {
    const double f_low = p.objective(*lower);
    rep.extras["witness_objective"] = f_low;
    rep.extras["spurious"] = f_low < f_star ? 1.0 : 0.0;
    rep.witnesses.push_back(*lower);
  } else {
    rep.extras["spurious"] = 0.0;
    rep.notes.push_back("no point with lower objective is known");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Witnesses

double evaluate_witness(const ProblemOracle& p, const CertificateReport& rep) {
  if (rep.problem_id != p.id()) throw MismatchError("evaluate_witness: problem mismatch");
  if (rep.witnesses.empty()) throw MismatchError("evaluate_witness: report has no witness");
  const auto& w = rep.witnesses;
  auto need = [&](std::size_t n) {
    if (w.size() < n) throw MismatchError("evaluate_witness: missing witness points");
  };
  auto extra = [&](const std::string& key) {
    const auto it = rep.extras.find(key);
    if (it == rep.extras.end()) throw MismatchError("evaluate_witness: missing extra " + key);
    return it->second;
  };

  if (rep.name == "subregularity") {
    return p.dist_S(w[0]) / std::pow(norm2(p.subgradient(w[0])), extra("theta"));
  }
  if (rep.name == "verdier") {
    need(2);
    return verdier_ratio(p, w[0], w[1]);
  }
  if (rep.name == "local-min") {
    return p.objective(w[0]) - p.objective(p.reference_point());
  }
  if (rep.name == "chetaev") {
    need(2);
    return p.chetaev(w[1]) - p.chetaev(w[0]) -
           p.c1(extra("alpha")) * std::pow(p.dist_S(w[0]), p.theta1());
  }
  if (rep.name == "monotonicity") {
    need(2);
    return p.dist_S(w[1]) - p.dist_S(w[0]);
  }
  if (rep.name == "projection-ratio") {
    need(2);
    return distance(w[0], p.project_S(w[1])) / p.dist_S(w[0]);
  }
  throw MismatchError("evaluate_witness: unknown certifier '" + rep.name + "'");
}

}  // namespace chetaev
