#include "chetaev/trajectory_csv.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "chetaev/errors.hpp"
#include "chetaev/format.hpp"

namespace chetaev {

namespace {

constexpr std::string_view kFixedHeader = "k,alpha,f,C,dS,escaped";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = line.find(',');
    out.push_back(trim(line.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    line = line.substr(comma + 1);
  }
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ProblemPoint& x_star) {
  const bool coords = traj.dim <= kMaxCoordinateColumns;
  out << kFixedHeader;
  if (coords) {
    for (std::size_t i = 0; i < traj.dim; ++i) out << ",x" << i;
  } else {
    out << ",norm_x_minus_xstar";
  }
  out << '\n';
  for (const StepRecord& r : traj.records) {
    const bool escaped =
        traj.outcome.kind == OutcomeKind::Escaped && r.k == traj.outcome.k;
    out << r.k << ',' << format_double(r.alpha) << ',' << format_double(r.f) << ','
        << format_double(r.chetaev) << ',' << format_double(r.dist_S) << ','
        << (escaped ? 1 : 0);
    if (coords) {
      for (double c : r.x.entries()) out << ',' << format_double(c);
    } else {
      out << ',' << format_double(distance(r.x, x_star));
    }
    out << '\n';
  }
}

TrajectoryTable parse_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) {
    throw MalformedInputError("trajectory CSV: empty file");
  }
  const std::vector<std::string_view> header = split_fields(line);
  if (!trim(line).starts_with(kFixedHeader) || header.size() < 7) {
    throw MalformedInputError("trajectory CSV: unexpected header");
  }
  TrajectoryTable table;
  table.has_coordinates = header[6] != "norm_x_minus_xstar";
  table.dim = table.has_coordinates ? header.size() - 6 : 0;
  if (!table.has_coordinates && header.size() != 7) {
    throw MalformedInputError("trajectory CSV: unexpected header");
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string_view> f = split_fields(line);
    if (f.size() != header.size()) {
      throw MalformedInputError("trajectory CSV line " + std::to_string(line_no) +
                                ": wrong field count");
    }
    TrajectoryRow row{};
    const double k = parse_double(f[0]);
    if (k < 0.0 || k != static_cast<double>(static_cast<std::size_t>(k))) {
      throw MalformedInputError("trajectory CSV line " + std::to_string(line_no) + ": bad k");
    }
    row.k = static_cast<std::size_t>(k);
    row.alpha = parse_double(f[1]);
    row.f = parse_double(f[2]);
    row.chetaev = parse_double(f[3]);
    row.dist_S = parse_double(f[4]);
    if (f[5] != "0" && f[5] != "1") {
      throw MalformedInputError("trajectory CSV line " + std::to_string(line_no) +
                                ": escaped must be 0 or 1");
    }
    row.escaped = f[5] == "1";
    if (table.has_coordinates) {
      for (std::size_t i = 6; i < f.size(); ++i) row.coords.push_back(parse_double(f[i]));
      if (!all_finite(row.coords)) {
        throw MalformedInputError("trajectory CSV line " + std::to_string(line_no) +
                                  ": non-finite coordinate");
      }
    } else {
      row.norm_to_star = parse_double(f[6]);
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw MalformedInputError("trajectory CSV: no data rows");
  return table;
}

ReplayResult replay(const ProblemOracle& p, const TrajectoryTable& table) {
  if (!table.has_coordinates) {
    throw MismatchError("replay: trajectory CSV has no coordinate columns (dimension > 16)");
  }
  if (table.dim != p.dim()) {
    throw MismatchError("replay: CSV has " + std::to_string(table.dim) +
                        " coordinates, problem '" + p.id() + "' has " + std::to_string(p.dim()));
  }

  ReplayResult result{Verdict::Satisfied, std::nullopt, {}};
  Trajectory traj;
  traj.problem_id = p.id();
  traj.dim = p.dim();
  traj.alpha = table.rows.front().alpha;

  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const TrajectoryRow& r = table.rows[row];
    ProblemPoint x{std::vector<double>(r.coords)};
    DenseVector v = p.subgradient(x);
    if (row > 0 && !result.failing_row) {
      const StepRecord& prev = traj.records.back();
      bool exact = r.alpha == prev.alpha && r.k == prev.k + 1;
      for (std::size_t i = 0; i < x.size() && exact; ++i) {
        exact = x[i] == prev.x[i] - prev.alpha * prev.v[i];
      }
      if (!exact) {
        result.failing_row = row;
        result.verdict = Verdict::Violated;
      }
    }
    traj.records.push_back(
        StepRecord{r.k, x, p.objective(x), p.chetaev(x), p.dist_S(x), std::move(v), r.alpha});
  }
  const TrajectoryRow& last = table.rows.back();
  traj.outcome = {last.escaped ? OutcomeKind::Escaped : OutcomeKind::MaxIters, last.k};

  result.chetaev = audit_chetaev(p, traj);
  if (result.chetaev.verdict == Verdict::Violated) result.verdict = Verdict::Violated;
  return result;
}

}  // namespace chetaev
