#pragma once

// Small dense real linear algebra. Every reduction accumulates left to right
// in row-major order, so results are bit-reproducible across runs.

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace chetaev {

class DenseVector {
 public:
  explicit DenseVector(std::vector<double> entries);
  DenseVector(std::initializer_list<double> entries);

  static DenseVector zeros(std::size_t n);
  static DenseVector unit(std::size_t n, std::size_t i);

  std::size_t size() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  std::span<const double> entries() const { return entries_; }

  /// Replaces entry i; the value must be finite.
  void set(std::size_t i, double value);

  friend bool operator==(const DenseVector&, const DenseVector&) = default;

 private:
  std::vector<double> entries_;
};

class DenseMatrix {
 public:
  /// Row-major entries; rows * cols must equal entries.size().
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix zeros(std::size_t rows, std::size_t cols);
  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  std::span<const double> entries() const { return entries_; }

  void set(std::size_t i, std::size_t j, double value);

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
};

// Entrywise norms.
double l1_norm(const DenseMatrix& a);
double frobenius_norm(const DenseMatrix& a);
double frobenius_norm_squared(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);

/// Entrywise sign with `tie` returned at exact zeros. tie must lie in [-1, 1].
DenseMatrix sign_matrix(const DenseMatrix& a, double tie = 0.0);

DenseMatrix transpose(const DenseMatrix& a);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// a * b^T without materializing the transpose.
DenseMatrix matmul_transposed(const DenseMatrix& a, const DenseMatrix& b);
/// a^T * b without materializing the transpose.
DenseMatrix transposed_matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix hadamard(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix abs_entries(const DenseMatrix& a);
/// y + alpha * x
DenseMatrix axpy(double alpha, const DenseMatrix& x, const DenseMatrix& y);

double dot(const DenseVector& a, const DenseVector& b);
double norm2(const DenseVector& a);
double norm_inf(const DenseVector& a);
double distance(const DenseVector& a, const DenseVector& b);
/// y + alpha * x
DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y);
DenseVector subtract(const DenseVector& a, const DenseVector& b);
DenseVector scale(double alpha, const DenseVector& x);

bool all_finite(std::span<const double> values);

// Matrix CSV: one row per line, comma separated decimals, no header.
DenseMatrix parse_matrix_csv(std::istream& in);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const DenseMatrix& a);

}  // namespace chetaev
