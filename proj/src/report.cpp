#include <istream>
#include <ostream>
#include <string>

#include "chetaev/certifiers.hpp"
#include "chetaev/errors.hpp"
#include "chetaev/format.hpp"

namespace chetaev {

namespace {

std::string join_point(const ProblemPoint& x) {
  std::string out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(x[i]);
  }
  return out;
}

ProblemPoint split_point(std::string_view text) {
  std::vector<double> coords;
  while (true) {
    const auto comma = text.find(',');
    coords.push_back(parse_double(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return DenseVector(std::move(coords));
}

std::size_t parse_count(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw MalformedInputError("bad integer '" + text + "'");
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw MalformedInputError("bad integer '" + text + "'");
  }
}

}  // namespace

void write_report(std::ostream& out, const CertificateReport& r) {
  out << "name = " << r.name << '\n';
  out << "problem = " << r.problem_id << '\n';
  out << "verdict = " << to_string(r.verdict) << '\n';
  out << "samples = " << r.samples << '\n';
  out << "checked = " << r.checked << '\n';
  out << "skipped = " << r.skipped << '\n';
  out << "statistic_name = " << r.statistic_name << '\n';
  out << "statistic = " << format_double(r.statistic) << '\n';
  if (r.constant) out << "constant = " << format_double(*r.constant) << '\n';
  if (r.failing_step) out << "failing_step = " << *r.failing_step << '\n';
  for (std::size_t i = 0; i < r.witnesses.size(); ++i) {
    out << "witness." << i << " = " << join_point(r.witnesses[i]) << '\n';
  }
  for (const auto& [key, value] : r.extras) {
    out << "extra." << key << " = " << format_double(value) << '\n';
  }
  for (const std::string& note : r.notes) out << "note = " << note << '\n';
}

CertificateReport parse_report(std::istream& in) {
  CertificateReport r;
  bool saw_name = false;
  bool saw_verdict = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) {
      throw MalformedInputError("report line " + std::to_string(line_no) + ": missing ' = '");
    }
    const std::string key(trim(std::string_view(line).substr(0, eq)));
    const std::string value(trim(std::string_view(line).substr(eq + 3)));
    if (key == "name") {
      r.name = value;
      saw_name = true;
    } else if (key == "problem") {
      r.problem_id = value;
    } else if (key == "verdict") {
      r.verdict = parse_verdict(value);
      saw_verdict = true;
    } else if (key == "samples") {
      r.samples = parse_count(value);
    } else if (key == "checked") {
      r.checked = parse_count(value);
    } else if (key == "skipped") {
      r.skipped = parse_count(value);
    } else if (key == "statistic_name") {
      r.statistic_name = value;
    } else if (key == "statistic") {
      r.statistic = parse_double(value);
    } else if (key == "constant") {
      r.constant = parse_double(value);
    } else if (key == "failing_step") {
      r.failing_step = parse_count(value);
    } else if (key.starts_with("witness.")) {
      if (parse_count(key.substr(8)) != r.witnesses.size()) {
        throw MalformedInputError("report: witnesses out of order");
      }
      r.witnesses.push_back(split_point(value));
    } else if (key.starts_with("extra.")) {
      r.extras[key.substr(6)] = parse_double(value);
    } else if (key == "note") {
      r.notes.push_back(value);
    } else {
      throw MalformedInputError("report: unknown key '" + key + "'");
    }
  }
  if (!saw_name || !saw_verdict) throw MalformedInputError("report: missing name or verdict");
  return r;
}

}  // namespace chetaev
