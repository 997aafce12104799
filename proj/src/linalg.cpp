#include "chetaev/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "chetaev/errors.hpp"
#include "chetaev/format.hpp"

namespace chetaev {

namespace {

void require_finite(std::span<const double> values, const char* what) {
  if (!all_finite(values)) throw NonFiniteError(std::string(what) + ": non-finite entry");
}

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
}

void require_same_size(const DenseVector& a, const DenseVector& b, const char* op) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(op) + ": length " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
}

template <typename F>
DenseMatrix map_entries(const DenseMatrix& a, F&& f) {
  std::vector<double> out(a.entries().begin(), a.entries().end());
  for (double& v : out) v = f(v);
  return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

}  // namespace

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// DenseVector

DenseVector::DenseVector(std::vector<double> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ShapeError("DenseVector: length must be positive");
  require_finite(entries_, "DenseVector");
}

DenseVector::DenseVector(std::initializer_list<double> entries)
    : DenseVector(std::vector<double>(entries)) {}

DenseVector DenseVector::zeros(std::size_t n) { return DenseVector(std::vector<double>(n, 0.0)); }

DenseVector DenseVector::unit(std::size_t n, std::size_t i) {
  std::vector<double> e(n, 0.0);
  if (i >= n) throw ShapeError("DenseVector::unit: index out of range");
  e[i] = 1.0;
  return DenseVector(std::move(e));
}

void DenseVector::set(std::size_t i, double value) {
  if (!std::isfinite(value)) throw NonFiniteError("DenseVector::set: non-finite value");
  entries_.at(i) = value;
}

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows_ == 0 || cols_ == 0) throw ShapeError("DenseMatrix: dimensions must be positive");
  if (rows_ * cols_ != entries_.size()) {
    throw ShapeError("DenseMatrix: rows*cols does not match entry count");
  }
  require_finite(entries_, "DenseMatrix");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ShapeError("DenseMatrix: ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
  if (rows_ == 0 || cols_ == 0) throw ShapeError("DenseMatrix: dimensions must be positive");
  require_finite(entries_, "DenseMatrix");
}

DenseMatrix DenseMatrix::zeros(std::size_t rows, std::size_t cols) {
  return DenseMatrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix out = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) out.entries_[i * n + i] = 1.0;
  return out;
}

void DenseMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= rows_ || j >= cols_) throw ShapeError("DenseMatrix::set: index out of range");
  if (!std::isfinite(value)) throw NonFiniteError("DenseMatrix::set: non-finite value");
  entries_[i * cols_ + j] = value;
}

// ---------------------------------------------------------------------------
// Norms

double l1_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += std::abs(v);
  return s;
}

double frobenius_norm_squared(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.entries()) s += v * v;
  return s;
}

double frobenius_norm(const DenseMatrix& a) { return std::sqrt(frobenius_norm_squared(a)); }

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix sign_matrix(const DenseMatrix& a, double tie) {
  if (!(tie >= -1.0 && tie <= 1.0)) {
    throw InvalidSelectionError("sign_matrix: tie must lie in [-1, 1]");
  }
  return map_entries(a, [tie](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : tie); });
}

// ---------------------------------------------------------------------------
// Products

DenseMatrix transpose(const DenseMatrix& a) {
  std::vector<double> out(a.rows() * a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out[j * a.rows() + i] = a(i, j);
  }
  return DenseMatrix(a.cols(), a.rows(), std::move(out));
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
  std::vector<double> out(a.rows() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(l, j);
      out[i * b.cols() + j] = s;
    }
  }
  return DenseMatrix(a.rows(), b.cols(), std::move(out));
}

DenseMatrix matmul_transposed(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("matmul_transposed: inner dimensions differ");
  std::vector<double> out(a.rows() * b.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(j, l);
      out[i * b.rows() + j] = s;
    }
  }
  return DenseMatrix(a.rows(), b.rows(), std::move(out));
}

DenseMatrix transposed_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("transposed_matmul: inner dimensions differ");
  std::vector<double> out(a.cols() * b.cols(), 0.0);
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < a.rows(); ++l) s += a(l, i) * b(l, j);
      out[i * b.cols() + j] = s;
    }
  }
  return DenseMatrix(a.cols(), b.cols(), std::move(out));
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "subtract");
  std::vector<double> out(a.entries().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.entries()[i] - b.entries()[i];
  return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b) {
  require_same_shape(a, b, "hadamard");
  std::vector<double> out(a.entries().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.entries()[i] * b.entries()[i];
  return DenseMatrix(a.rows(), a.cols(), std::move(out));
}

DenseMatrix abs_entries(const DenseMatrix& a) {
  return map_entries(a, [](double v) { return std::abs(v); });
}

DenseMatrix axpy(double alpha, const DenseMatrix& x, const DenseMatrix& y) {
  require_same_shape(x, y, "axpy");
  std::vector<double> out(x.entries().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y.entries()[i] + alpha * x.entries()[i];
  return DenseMatrix(x.rows(), x.cols(), std::move(out));
}

// ---------------------------------------------------------------------------
// Vector operations

double dot(const DenseVector& a, const DenseVector& b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const DenseVector& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const DenseVector& a) {
  double m = 0.0;
  for (double v : a.entries()) m = std::max(m, std::abs(v));
  return m;
}

double distance(const DenseVector& a, const DenseVector& b) {
  require_same_size(a, b, "distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y) {
  require_same_size(x, y, "axpy");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + alpha * x[i];
  return DenseVector(std::move(out));
}

DenseVector subtract(const DenseVector& a, const DenseVector& b) {
  require_same_size(a, b, "subtract");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
  return DenseVector(std::move(out));
}

DenseVector scale(double alpha, const DenseVector& x) {
  std::vector<double> out(x.entries().begin(), x.entries().end());
  for (double& v : out) v *= alpha;
  return DenseVector(std::move(out));
}

// ---------------------------------------------------------------------------
// CSV

DenseMatrix parse_matrix_csv(std::istream& in) {
  std::vector<double> entries;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      try {
        entries.push_back(parse_double(rest.substr(0, comma)));
      } catch (const MalformedInputError& e) {
        throw MalformedInputError("matrix CSV line " + std::to_string(line_no) + ": " + e.what());
      }
      ++count;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw MalformedInputError("matrix CSV line " + std::to_string(line_no) + ": ragged row (" +
                                std::to_string(count) + " fields, expected " +
                                std::to_string(cols) + ")");
    }
    ++rows;
  }
  if (rows == 0) throw MalformedInputError("matrix CSV: no rows");
  if (!all_finite(entries)) throw MalformedInputError("matrix CSV: non-finite entry");
  return DenseMatrix(rows, cols, std::move(entries));
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix CSV: " + path.string());
  return parse_matrix_csv(in);
}

void write_matrix_csv(std::ostream& out, const DenseMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(a(i, j));
    }
    out << '\n';
  }
}

}  // namespace chetaev
