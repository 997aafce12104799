#pragma once

// Numerical audits of the hypotheses of the Chetaev-type instability test:
// metric subregularity of the subdifferential, the Verdier condition along
// S, Chetaev increments along a trajectory, distance monotonicity, and
// local minimality / spuriousness of x*.
//
// Sampling certifiers draw sample i from its own RNG stream derived from
// (seed, i), so a run with 2n samples evaluates a superset of the points of
// a run with n samples and extremal statistics are monotone in n.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chetaev/dynamics.hpp"
#include "chetaev/problem.hpp"

namespace chetaev {

enum class Verdict { Satisfied, Violated, BoundedBelowRegime, Inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& text);

struct CertificateReport {
  std::string name;
  std::string problem_id;
  Verdict verdict = Verdict::Inconclusive;
  /// Points evaluated (sampling certifiers) or trajectory steps examined.
  std::size_t samples = 0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::string statistic_name;
  double statistic = 0.0;
  std::optional<double> constant;
  std::optional<std::size_t> failing_step;
  /// Points at which `statistic` is attained; see evaluate_witness().
  std::vector<ProblemPoint> witnesses;
  std::map<std::string, double> extras;
  std::vector<std::string> notes;
};

/// Samples x in U \ S on spheres of radius rho_U 2^-j around x* and compares
/// d(x, S) with the norm of the subgradient selection (a proxy for
/// d(0, df(x)), exact off the nonsmooth locus).
///
/// BoundedBelowRegime: ||v|| does not shrink with d(x, S) (log-log slope
/// below 0.05 in magnitude, or log ||v|| essentially constant). The bound
/// d(x,S) <= c2 ||v|| then holds with c2 = max d/||v||, reported as the
/// statistic. Otherwise log d = log c + theta log ||v|| is fitted by least
/// squares and the result is Satisfied when the envelope constant is within
/// 5% of the fitted one.
CertificateReport certify_subregularity(const ProblemOracle& p, std::size_t n_samples,
                                        std::uint64_t seed);

/// Scales ||x - y|| used by certify_verdier, coarse to fine.
std::vector<double> verdier_scales();

/// Ratio ||P_T(y) v(x) - grad_S f(y)|| / ||x - y||.
double verdier_ratio(const ProblemOracle& p, const ProblemPoint& x, const ProblemPoint& y);

/// Pairs y = P_S(x) at normal distances 1e-3 ... 1e-9 (three of every four
/// sample blocks) plus unstructured pairs in U. Violated when the per-scale
/// maximum ratio at least doubles across each of the last three decades;
/// Satisfied with constant max ratio when it doubles across none.
CertificateReport certify_verdier(const ProblemOracle& p, std::size_t n_samples,
                                  std::uint64_t seed);

/// Checks C(x_{k+1}) - C(x_k) >= c1(alpha) d(x_k, S)^theta1 on every step
/// with both iterates in U \ S, to 1e-9 (1 + |C(x_k)|).
CertificateReport audit_chetaev(const ProblemOracle& p, const Trajectory& traj);

/// Checks d(x_{k+1}, S) >= d(x_k, S) on in-U steps with 0 < d(x_k, S) <= threshold.
/// extras["largest_valid_threshold"] is the supremum of thresholds for which
/// the check passes on this trajectory.
CertificateReport audit_distance_monotonicity(const ProblemOracle& p, const Trajectory& traj,
                                              double threshold);

/// Checks ||x_k - P_S(x_{k+1})|| / d(x_k, S) <= 1 + alpha c3 on in-U steps
/// off S (orthogonal projection onto an affine S, so the Lipschitz factor is 1).
CertificateReport audit_projection_ratio(const ProblemOracle& p, const Trajectory& traj,
                                         double c3);

/// Samples x in B(x*, rho_U) (uniform in the ball and on geometric spheres)
/// and checks f(x) >= f(x*) - 1e-12. Also evaluates the problem's lower
/// witness, if any, to establish spuriousness.
CertificateReport probe_local_min(const ProblemOracle& p, std::size_t n_samples,
                                  std::uint64_t seed);

/// Recomputes a report's statistic from its stored witnesses.
double evaluate_witness(const ProblemOracle& p, const CertificateReport& report);

// Key-value text form, one `key = value` per line.
void write_report(std::ostream& out, const CertificateReport& report);
CertificateReport parse_report(std::istream& in);

}  // namespace chetaev
