#pragma once

// Built-in problem oracles.
//
//   relu-l1       f(x) = |x3 max{x2,0} - 1| + |x3 max{x1+x2,0}|, x* = (1,1,0)
//   rpca          f(X,Y) = ||X Y^T - M||_1 around X* = [I_r; 0], Y* = 0
//   abs-control   f(x) = ||x||_1 on R^2, a strict minimum (stable control)
//   verdier-fail  f(x) = max{-x1^2 + 2 x2, |x2|}, S = R x {0}
//   quadratic     f(x) = ||x||^2 / 2, smooth baseline

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chetaev/problem.hpp"

namespace chetaev {

// ---------------------------------------------------------------------------
// ReLU network with l1 loss

double relu_objective(const DenseVector& x);

/// Subgradient from the local representation
///   f = 1 + x2 (|x3| - x3) + x1 |x3|,
/// valid in U = B((1,1,0), 0.25). Returns 0 on x3 = 0.
/// Throws OutOfNeighborhoodError outside U.
DenseVector relu_subgradient(const DenseVector& x);

class ReluL1Problem final : public ProblemOracle {
 public:
  static constexpr double kRadius = 0.25;

  ReluL1Problem();

  std::string id() const override { return "relu-l1"; }
  std::size_t dim() const override { return 3; }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return kRadius; }

  double objective(const ProblemPoint& x) const override;
  /// Local formula inside U; chain-rule selection (sign(0) = 0,
  /// relu'(0) = 0) outside, so trajectories may leave U.
  DenseVector subgradient(const ProblemPoint& x) const override;

  double dist_S(const ProblemPoint& x) const override;
  ProblemPoint project_S(const ProblemPoint& x) const override;
  DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const override;
  DenseVector riemannian_grad(const ProblemPoint& y) const override;

  /// C(x) = 1 - x1
  double chetaev(const ProblemPoint& x) const override;
  double theta1() const override { return 1.0; }
  double c1(double alpha) const override { return alpha; }

  bool near_nonsmooth_locus(const ProblemPoint& x, double h) const override;
  std::optional<ProblemPoint> lower_witness() const override;

 private:
  ProblemPoint x_star_;
};

// ---------------------------------------------------------------------------
// Robust PCA with l1 loss

double rpca_objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& m);
/// Lambda = sign(X Y^T - M) with `tie` at zero residuals.
DenseMatrix rpca_multiplier(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& m,
                            double tie = 0.0);
/// (Lambda Y, Lambda^T X).
std::pair<DenseMatrix, DenseMatrix> rpca_subgradient(const DenseMatrix& x, const DenseMatrix& y,
                                                     const DenseMatrix& m, double tie = 0.0);

class RpcaL1Problem final : public ProblemOracle {
 public:
  std::string id() const override { return "rpca"; }
  std::size_t dim() const override { return (rows_ + cols_) * rank_; }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return radius_; }

  double objective(const ProblemPoint& x) const override;
  DenseVector subgradient(const ProblemPoint& x) const override;

  /// ||Y||_F
  double dist_S(const ProblemPoint& x) const override;
  /// (X, 0)
  ProblemPoint project_S(const ProblemPoint& x) const override;
  DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const override;
  DenseVector riemannian_grad(const ProblemPoint& y) const override;

  /// ||X*||_F^2 - ||Y*||_F^2 + ||Y||_F^2 - ||X||_F^2
  double chetaev(const ProblemPoint& x) const override;
  double theta1() const override { return 0.0; }
  /// alpha^2 times a lower bound on ||Lambda^T X||_F^2 - ||Lambda Y||_F^2
  /// over U \ S; see increment_floor().
  double c1(double alpha) const override { return alpha * alpha * increment_floor_; }

  bool near_nonsmooth_locus(const ProblemPoint& x, double h) const override;
  /// Factors of the rank-one matrix keeping only the largest-magnitude
  /// entry of M.
  std::optional<ProblemPoint> lower_witness() const override;

  const DenseMatrix& data() const { return m_; }
  std::size_t rank() const { return rank_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  /// True when the input had zero columns rather than zero rows and was
  /// transposed on construction.
  bool transposed() const { return transposed_; }
  /// row_order()[i] is the input row (column, if transposed) stored at row i.
  const std::vector<std::size_t>& row_order() const { return row_order_; }
  /// (1 - rho - sqrt((m-r) n) rho)_+^2 - m n rho^2, clipped at 0.
  double increment_floor() const { return increment_floor_; }

  std::pair<DenseMatrix, DenseMatrix> split(const ProblemPoint& x) const;
  ProblemPoint join(const DenseMatrix& x, const DenseMatrix& y) const;

 private:
  friend RpcaL1Problem build_spurious_min(const DenseMatrix& m, std::size_t r);
  RpcaL1Problem(DenseMatrix m, std::size_t r, bool transposed, std::vector<std::size_t> order);

  DenseMatrix m_;
  std::size_t rank_;
  std::size_t rows_;
  std::size_t cols_;
  bool transposed_;
  std::vector<std::size_t> row_order_;
  double radius_;
  double increment_floor_;
  double x_star_norm_sq_;
  ProblemPoint x_star_;
};

/// Builds the spurious local minimum X* = [I_r; 0], Y* = 0 for data M with
/// at least r zero rows (or, failing that, r zero columns). Zero rows are
/// moved to the top; U has radius min(1/(2m), 0.1).
RpcaL1Problem build_spurious_min(const DenseMatrix& m, std::size_t r);

/// m x n matrix whose first `zero_rows` rows are zero and whose other entries
/// are uniform on [-3, 3], rounded to multiples of 2^-20 so that l1 sums are
/// exact in double precision.
DenseMatrix synthetic_rpca_matrix(std::size_t m, std::size_t n, std::size_t zero_rows,
                                  std::uint64_t seed);

// ---------------------------------------------------------------------------
// Controls

/// f(x) = ||x||_1, x* = 0, S = {0}. Stable; chetaev() is a placeholder.
class AbsControlProblem final : public ProblemOracle {
 public:
  explicit AbsControlProblem(std::size_t n = 2);

  std::string id() const override { return "abs-control"; }
  std::size_t dim() const override { return x_star_.size(); }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return 1.0; }

  double objective(const ProblemPoint& x) const override;
  DenseVector subgradient(const ProblemPoint& x) const override;
  double dist_S(const ProblemPoint& x) const override;
  ProblemPoint project_S(const ProblemPoint& x) const override;
  DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const override;
  DenseVector riemannian_grad(const ProblemPoint& y) const override;

  /// f(x*) - f(x)
  double chetaev(const ProblemPoint& x) const override;
  bool declares_chetaev() const override { return false; }
  double theta1() const override { return 0.0; }
  double c1(double) const override { return 0.0; }

  bool near_nonsmooth_locus(const ProblemPoint& x, double h) const override;

 private:
  ProblemPoint x_star_;
};

double verdier_fail_objective(const DenseVector& x);
/// Gradient of the active branch, ties to -x1^2 + 2 x2; sign(0) = 0.
DenseVector verdier_fail_subgradient(const DenseVector& x);

/// f is zero on S = R x {0} near the origin but subgradients of the branch
/// -x1^2 + 2 x2 keep a tangential part of size 2|x1| at normal distance
/// ~x1^2, so the Verdier bound fails.
class VerdierFailProblem final : public ProblemOracle {
 public:
  VerdierFailProblem();

  std::string id() const override { return "verdier-fail"; }
  std::size_t dim() const override { return 2; }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return 0.5; }

  double objective(const ProblemPoint& x) const override;
  DenseVector subgradient(const ProblemPoint& x) const override;
  double dist_S(const ProblemPoint& x) const override;
  ProblemPoint project_S(const ProblemPoint& x) const override;
  DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const override;
  DenseVector riemannian_grad(const ProblemPoint& y) const override;

  /// f(x*) - f(x)
  double chetaev(const ProblemPoint& x) const override;
  bool declares_chetaev() const override { return false; }
  double theta1() const override { return 0.0; }
  double c1(double) const override { return 0.0; }

  bool near_nonsmooth_locus(const ProblemPoint& x, double h) const override;

 private:
  ProblemPoint x_star_;
};

/// f(x) = ||x||^2 / 2, x* = 0, S = {0}.
class QuadraticProblem final : public ProblemOracle {
 public:
  explicit QuadraticProblem(std::size_t n = 3);

  std::string id() const override { return "quadratic"; }
  std::size_t dim() const override { return x_star_.size(); }
  const ProblemPoint& reference_point() const override { return x_star_; }
  double neighborhood_radius() const override { return 1.0; }

  double objective(const ProblemPoint& x) const override;
  DenseVector subgradient(const ProblemPoint& x) const override;
  double dist_S(const ProblemPoint& x) const override;
  ProblemPoint project_S(const ProblemPoint& x) const override;
  DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const override;
  DenseVector riemannian_grad(const ProblemPoint& y) const override;

  /// f(x*) - f(x)
  double chetaev(const ProblemPoint& x) const override;
  bool declares_chetaev() const override { return false; }
  double theta1() const override { return 0.0; }
  double c1(double) const override { return 0.0; }

  bool near_nonsmooth_locus(const ProblemPoint&, double) const override { return false; }

 private:
  ProblemPoint x_star_;
};

// ---------------------------------------------------------------------------
// Factory

struct ProblemSpec {
  std::string id;
  /// rpca: data CSV. When absent a synthetic matrix is generated.
  std::optional<std::filesystem::path> matrix = std::nullopt;
  std::size_t rank = 2;
  std::size_t synthetic_rows = 8;
  std::size_t synthetic_cols = 6;
  std::uint64_t matrix_seed = 2024;
};

std::vector<std::string> builtin_problem_ids();

/// Throws ConfigError for an unknown id; IoError / MalformedInputError /
/// ConstructionError for bad rpca data.
std::unique_ptr<ProblemOracle> make_problem(const ProblemSpec& spec);

}  // namespace chetaev
