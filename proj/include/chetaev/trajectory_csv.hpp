#pragma once

// Trajectory CSV: header `k,alpha,f,C,dS,escaped` followed by x0..x{n-1}
// when n <= 16, or by `norm_x_minus_xstar` otherwise. Reals are written in
// shortest round-trip form, so a replay sees the exact iterates.

#include <iosfwd>
#include <optional>
#include <vector>

#include "chetaev/certifiers.hpp"
#include "chetaev/dynamics.hpp"

namespace chetaev {

inline constexpr std::size_t kMaxCoordinateColumns = 16;

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ProblemPoint& x_star);

struct TrajectoryRow {
  std::size_t k;
  double alpha;
  double f;
  double chetaev;
  double dist_S;
  bool escaped;
  std::vector<double> coords;          // empty when not logged
  std::optional<double> norm_to_star;  // set when coordinates were elided
};

struct TrajectoryTable {
  bool has_coordinates = false;
  std::size_t dim = 0;  // coordinate column count (0 when elided)
  std::vector<TrajectoryRow> rows;
};

/// Throws MalformedInputError for an empty file, a bad header, ragged rows
/// or non-numeric fields.
TrajectoryTable parse_trajectory_csv(std::istream& in);

struct ReplayResult {
  Verdict verdict;
  /// First row whose iterate differs from x_{k-1} - alpha v_{k-1}.
  std::optional<std::size_t> failing_row;
  CertificateReport chetaev;
};

/// Re-verifies every update bitwise against the oracle's selection and
/// re-runs audit_chetaev on the reconstructed trajectory. Throws
/// MismatchError when the table has no coordinates or the wrong dimension.
ReplayResult replay(const ProblemOracle& p, const TrajectoryTable& table);

}  // namespace chetaev
