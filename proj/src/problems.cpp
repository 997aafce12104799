#include "chetaev/problems.hpp"

#include <algorithm>
#include <cmath>

#include "chetaev/errors.hpp"
#include "chetaev/rng.hpp"

namespace chetaev {

namespace {

double sign0(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

void require_dim(const DenseVector& x, std::size_t n, const char* what) {
  if (x.size() != n) {
    throw ShapeError(std::string(what) + ": expected dimension " + std::to_string(n) + ", got " +
                     std::to_string(x.size()));
  }
}

// Chain-rule selection of the ReLU objective, valid everywhere.
DenseVector relu_global_selection(const DenseVector& x) {
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  const double p2 = std::max(x2, 0.0);
  const double p12 = std::max(x1 + x2, 0.0);
  const double on2 = x2 > 0.0 ? 1.0 : 0.0;
  const double on12 = x1 + x2 > 0.0 ? 1.0 : 0.0;
  const double sa = sign0(x3 * p2 - 1.0);
  if (x3 == 0.0) {
    // b = 0: pick s_b in [-1, 1] closest to cancelling -p2 (sa = -1 here).
    if (p2 <= p12) return DenseVector::zeros(3);
    return DenseVector{0.0, 0.0, sa * p2 + p12};
  }
  const double sb = sign0(x3 * p12);
  return DenseVector{sb * x3 * on12, sa * x3 * on2 + sb * x3 * on12, sa * p2 + sb * p12};
}

}  // namespace

// ---------------------------------------------------------------------------
// ReLU

double relu_objective(const DenseVector& x) {
  require_dim(x, 3, "relu_objective");
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  return std::abs(x3 * std::max(x2, 0.0) - 1.0) + std::abs(x3 * std::max(x1 + x2, 0.0));
}

DenseVector relu_subgradient(const DenseVector& x) {
  require_dim(x, 3, "relu_subgradient");
  if (distance(x, DenseVector{1.0, 1.0, 0.0}) > ReluL1Problem::kRadius) {
    throw OutOfNeighborhoodError("relu_subgradient: point outside B((1,1,0), 0.25)");
  }
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  if (x3 > 0.0) return DenseVector{x3, 0.0, x1};
  if (x3 < 0.0) return DenseVector{-x3, -2.0 * x3, -2.0 * x2 - x1};
  return DenseVector::zeros(3);
}

ReluL1Problem::ReluL1Problem() : x_star_{1.0, 1.0, 0.0} {}

double ReluL1Problem::objective(const ProblemPoint& x) const { return relu_objective(x); }

DenseVector ReluL1Problem::subgradient(const ProblemPoint& x) const {
  require_dim(x, 3, "ReluL1Problem::subgradient");
  if (in_neighborhood(x)) return relu_subgradient(x);
  return relu_global_selection(x);
}

double ReluL1Problem::dist_S(const ProblemPoint& x) const { return std::abs(x[2]); }

ProblemPoint ReluL1Problem::project_S(const ProblemPoint& x) const {
  return DenseVector{x[0], x[1], 0.0};
}

DenseVector ReluL1Problem::tangent_project(const ProblemPoint&, const DenseVector& v) const {
  return DenseVector{v[0], v[1], 0.0};
}

DenseVector ReluL1Problem::riemannian_grad(const ProblemPoint&) const {
  return DenseVector::zeros(3);
}

double ReluL1Problem::chetaev(const ProblemPoint& x) const { return 1.0 - x[0]; }

bool ReluL1Problem::near_nonsmooth_locus(const ProblemPoint& x, double h) const {
  const double band = 4.0 * h;
  const double x1 = x[0];
  const double x2 = x[1];
  const double x3 = x[2];
  return std::abs(x3) <= band || std::abs(x2) <= band || std::abs(x1 + x2) <= band ||
         std::abs(x3 * std::max(x2, 0.0) - 1.0) <= band * (1.0 + std::abs(x2) + std::abs(x3));
}

std::optional<ProblemPoint> ReluL1Problem::lower_witness() const {
  return DenseVector{-1.0, 1.0, 1.0};
}

// ---------------------------------------------------------------------------
// Robust PCA

double rpca_objective(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& m) {
  return l1_norm(subtract(matmul_transposed(x, y), m));
}

DenseMatrix rpca_multiplier(const DenseMatrix& x, const DenseMatrix& y, const DenseMatrix& m,
                            double tie) {
  return sign_matrix(subtract(matmul_transposed(x, y), m), tie);
}

std::pair<DenseMatrix, DenseMatrix> rpca_subgradient(const DenseMatrix& x, const DenseMatrix& y,
                                                     const DenseMatrix& m, double tie) {
  const DenseMatrix lambda = rpca_multiplier(x, y, m, tie);
  return {matmul(lambda, y), transposed_matmul(lambda, x)};
}

RpcaL1Problem::RpcaL1Problem(DenseMatrix m, std::size_t r, bool transposed,
                             std::vector<std::size_t> order)
    : m_(std::move(m)),
      rank_(r),
      rows_(m_.rows()),
      cols_(m_.cols()),
      transposed_(transposed),
      row_order_(std::move(order)),
      radius_(std::min(1.0 / (2.0 * static_cast<double>(m_.rows())), 0.1)),
      increment_floor_(0.0),
      x_star_norm_sq_(static_cast<double>(r)),
      x_star_(DenseVector::zeros((m_.rows() + m_.cols()) * r)) {
  for (std::size_t i = 0; i < r; ++i) x_star_.set(i * r + i, 1.0);

  // sigma_min(X_hat) >= 1 - rho and Lambda_hat has a +-1 entry off S, so
  // ||Lambda_hat^T X_hat||_F >= 1 - rho; the tail rows and Lambda Y are
  // bounded through ||Lambda||_2 <= ||Lambda||_F.
  const double rho = radius_;
  const double mm = static_cast<double>(rows_);
  const double nn = static_cast<double>(cols_);
  const double rr = static_cast<double>(r);
  const double head = std::max(0.0, 1.0 - rho - std::sqrt((mm - rr) * nn) * rho);
  increment_floor_ = std::max(0.0, head * head - mm * nn * rho * rho);
}

std::pair<DenseMatrix, DenseMatrix> RpcaL1Problem::split(const ProblemPoint& x) const {
  require_dim(x, dim(), "RpcaL1Problem::split");
  const auto e = x.entries();
  const std::size_t nx = rows_ * rank_;
  return {DenseMatrix(rows_, rank_, std::vector<double>(e.begin(), e.begin() + nx)),
          DenseMatrix(cols_, rank_, std::vector<double>(e.begin() + nx, e.end()))};
}

ProblemPoint RpcaL1Problem::join(const DenseMatrix& x, const DenseMatrix& y) const {
  if (x.rows() != rows_ || x.cols() != rank_ || y.rows() != cols_ || y.cols() != rank_) {
    throw ShapeError("RpcaL1Problem::join: factor shapes do not match the problem");
  }
  std::vector<double> out(x.entries().begin(), x.entries().end());
  out.insert(out.end(), y.entries().begin(), y.entries().end());
  return DenseVector(std::move(out));
}

double RpcaL1Problem::objective(const ProblemPoint& x) const {
  const auto [xm, ym] = split(x);
  return rpca_objective(xm, ym, m_);
}

DenseVector RpcaL1Problem::subgradient(const ProblemPoint& x) const {
  const auto [xm, ym] = split(x);
  const auto [gx, gy] = rpca_subgradient(xm, ym, m_, 0.0);
  return join(gx, gy);
}

double RpcaL1Problem::dist_S(const ProblemPoint& x) const {
  require_dim(x, dim(), "RpcaL1Problem::dist_S");
  double s = 0.0;
  for (std::size_t i = rows_ * rank_; i < x.size(); ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

ProblemPoint RpcaL1Problem::project_S(const ProblemPoint& x) const {
  require_dim(x, dim(), "RpcaL1Problem::project_S");
  std::vector<double> out(x.entries().begin(), x.entries().end());
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(rows_ * rank_), out.end(), 0.0);
  return DenseVector(std::move(out));
}

DenseVector RpcaL1Problem::tangent_project(const ProblemPoint&, const DenseVector& v) const {
  return project_S(v);
}

DenseVector RpcaL1Problem::riemannian_grad(const ProblemPoint&) const {
  return DenseVector::zeros(dim());
}

double RpcaL1Problem::chetaev(const ProblemPoint& x) const {
  require_dim(x, dim(), "RpcaL1Problem::chetaev");
  const std::size_t nx = rows_ * rank_;
  double xs = 0.0;
  for (std::size_t i = 0; i < nx; ++i) xs += x[i] * x[i];
  double ys = 0.0;
  for (std::size_t i = nx; i < x.size(); ++i) ys += x[i] * x[i];
  return x_star_norm_sq_ + ys - xs;
}

bool RpcaL1Problem::near_nonsmooth_locus(const ProblemPoint& x, double h) const {
  const auto [xm, ym] = split(x);
  const DenseMatrix residual = subtract(matmul_transposed(xm, ym), m_);
  const double reach = 4.0 * h * (max_abs(xm) + max_abs(ym) + h) * static_cast<double>(rank_);
  for (double e : residual.entries()) {
    if (std::abs(e) <= reach) return true;
  }
  return false;
}

std::optional<ProblemPoint> RpcaL1Problem::lower_witness() const {
  std::size_t bi = 0;
  std::size_t bj = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (std::abs(m_(i, j)) > std::abs(m_(bi, bj))) {
        bi = i;
        bj = j;
      }
    }
  }
  DenseMatrix xb = DenseMatrix::zeros(rows_, rank_);
  DenseMatrix yb = DenseMatrix::zeros(cols_, rank_);
  xb.set(bi, 0, m_(bi, bj));
  yb.set(bj, 0, 1.0);
  return join(xb, yb);
}

RpcaL1Problem build_spurious_min(const DenseMatrix& m, std::size_t r) {
  if (max_abs(m) == 0.0) throw ConstructionError("build_spurious_min: M must be nonzero");
  if (r == 0) throw ConstructionError("build_spurious_min: rank must be positive");

  auto zero_lines = [](const DenseMatrix& a) {
    std::vector<std::size_t> zeros;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      bool all_zero = true;
      for (std::size_t j = 0; j < a.cols() && all_zero; ++j) all_zero = a(i, j) == 0.0;
      if (all_zero) zeros.push_back(i);
    }
    return zeros;
  };

  bool flipped = false;
  DenseMatrix work = m;
  std::vector<std::size_t> zeros = zero_lines(work);
  if (zeros.size() < r) {
    DenseMatrix t = transpose(m);
    std::vector<std::size_t> zero_cols = zero_lines(t);
    if (zero_cols.size() < r) {
      throw ConstructionError("build_spurious_min: M needs at least " + std::to_string(r) +
                              " zero rows or zero columns");
    }
    work = std::move(t);
    zeros = std::move(zero_cols);
    flipped = true;
  }
  if (r >= std::min(work.rows(), work.cols())) {
    throw ConstructionError("build_spurious_min: rank must be below min(m, n)");
  }

  // Zero rows first (stable), then the rest in input order.
  std::vector<std::size_t> order = zeros;
  for (std::size_t i = 0; i < work.rows(); ++i) {
    if (std::find(zeros.begin(), zeros.end(), i) == zeros.end()) order.push_back(i);
  }
  std::vector<double> permuted;
  permuted.reserve(work.rows() * work.cols());
  for (std::size_t i : order) {
    for (std::size_t j = 0; j < work.cols(); ++j) permuted.push_back(work(i, j));
  }
  return RpcaL1Problem(DenseMatrix(work.rows(), work.cols(), std::move(permuted)), r, flipped,
                       std::move(order));
}

DenseMatrix synthetic_rpca_matrix(std::size_t m, std::size_t n, std::size_t zero_rows,
                                  std::uint64_t seed) {
  if (zero_rows >= m) throw ConstructionError("synthetic_rpca_matrix: no nonzero rows left");
  Rng rng(seed);
  std::vector<double> entries(m * n, 0.0);
  constexpr double kGrid = 1048576.0;  // 2^20
  for (std::size_t i = zero_rows; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      entries[i * n + j] = std::round(rng.uniform(-3.0, 3.0) * kGrid) / kGrid;
    }
  }
  return DenseMatrix(m, n, std::move(entries));
}

// ---------------------------------------------------------------------------
// abs-control

AbsControlProblem::AbsControlProblem(std::size_t n) : x_star_(DenseVector::zeros(n)) {}

double AbsControlProblem::objective(const ProblemPoint& x) const {
  double s = 0.0;
  for (double v : x.entries()) s += std::abs(v);
  return s;
}

DenseVector AbsControlProblem::subgradient(const ProblemPoint& x) const {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = sign0(x[i]);
  return DenseVector(std::move(g));
}

double AbsControlProblem::dist_S(const ProblemPoint& x) const { return norm2(x); }

ProblemPoint AbsControlProblem::project_S(const ProblemPoint& x) const {
  return DenseVector::zeros(x.size());
}

DenseVector AbsControlProblem::tangent_project(const ProblemPoint&, const DenseVector& v) const {
  return DenseVector::zeros(v.size());
}

DenseVector AbsControlProblem::riemannian_grad(const ProblemPoint& y) const {
  return DenseVector::zeros(y.size());
}

double AbsControlProblem::chetaev(const ProblemPoint& x) const { return -objective(x); }

bool AbsControlProblem::near_nonsmooth_locus(const ProblemPoint& x, double h) const {
  for (double v : x.entries()) {
    if (std::abs(v) <= 4.0 * h) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// verdier-fail

double verdier_fail_objective(const DenseVector& x) {
  require_dim(x, 2, "verdier_fail_objective");
  return std::max(-x[0] * x[0] + 2.0 * x[1], std::abs(x[1]));
}

DenseVector verdier_fail_subgradient(const DenseVector& x) {
  require_dim(x, 2, "verdier_fail_subgradient");
  const double first = -x[0] * x[0] + 2.0 * x[1];
  const double second = std::abs(x[1]);
  if (first >= second) return DenseVector{-2.0 * x[0], 2.0};
  return DenseVector{0.0, sign0(x[1])};
}

VerdierFailProblem::VerdierFailProblem() : x_star_{0.0, 0.0} {}

double VerdierFailProblem::objective(const ProblemPoint& x) const {
  return verdier_fail_objective(x);
}

DenseVector VerdierFailProblem::subgradient(const ProblemPoint& x) const {
  return verdier_fail_subgradient(x);
}

double VerdierFailProblem::dist_S(const ProblemPoint& x) const { return std::abs(x[1]); }

ProblemPoint VerdierFailProblem::project_S(const ProblemPoint& x) const {
  return DenseVector{x[0], 0.0};
}

DenseVector VerdierFailProblem::tangent_project(const ProblemPoint&, const DenseVector& v) const {
  return DenseVector{v[0], 0.0};
}

DenseVector VerdierFailProblem::riemannian_grad(const ProblemPoint&) const {
  return DenseVector::zeros(2);
}

double VerdierFailProblem::chetaev(const ProblemPoint& x) const { return -objective(x); }

bool VerdierFailProblem::near_nonsmooth_locus(const ProblemPoint& x, double h) const {
  const double band = 4.0 * h;
  const double gap = (-x[0] * x[0] + 2.0 * x[1]) - std::abs(x[1]);
  return std::abs(x[1]) <= band || std::abs(gap) <= band * (3.0 + 2.0 * std::abs(x[0]));
}

// ---------------------------------------------------------------------------
// quadratic

QuadraticProblem::QuadraticProblem(std::size_t n) : x_star_(DenseVector::zeros(n)) {}

double QuadraticProblem::objective(const ProblemPoint& x) const { return 0.5 * dot(x, x); }

DenseVector QuadraticProblem::subgradient(const ProblemPoint& x) const { return x; }

double QuadraticProblem::dist_S(const ProblemPoint& x) const { return norm2(x); }

ProblemPoint QuadraticProblem::project_S(const ProblemPoint& x) const {
  return DenseVector::zeros(x.size());
}

DenseVector QuadraticProblem::tangent_project(const ProblemPoint&, const DenseVector& v) const {
  return DenseVector::zeros(v.size());
}

DenseVector QuadraticProblem::riemannian_grad(const ProblemPoint& y) const {
  return DenseVector::zeros(y.size());
}

double QuadraticProblem::chetaev(const ProblemPoint& x) const { return -objective(x); }

// ---------------------------------------------------------------------------
// Factory

std::vector<std::string> builtin_problem_ids() {
  return {"relu-l1", "rpca", "abs-control", "verdier-fail", "quadratic"};
}

std::unique_ptr<ProblemOracle> make_problem(const ProblemSpec& spec) {
  if (spec.id == "relu-l1") return std::make_unique<ReluL1Problem>();
  if (spec.id == "abs-control") return std::make_unique<AbsControlProblem>();
  if (spec.id == "verdier-fail") return std::make_unique<VerdierFailProblem>();
  if (spec.id == "quadratic") return std::make_unique<QuadraticProblem>();
  if (spec.id == "rpca") {
    const DenseMatrix m =
        spec.matrix ? read_matrix_csv(*spec.matrix)
                    : synthetic_rpca_matrix(spec.synthetic_rows, spec.synthetic_cols, spec.rank,
                                            spec.matrix_seed);
    return std::make_unique<RpcaL1Problem>(build_spurious_min(m, spec.rank));
  }
  throw ConfigError("unknown problem id '" + spec.id + "'");
}

}  // namespace chetaev
