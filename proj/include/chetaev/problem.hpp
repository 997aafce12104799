#pragma once

#include <optional>
#include <string>

#include "chetaev/linalg.hpp"

namespace chetaev {

/// A point of the ambient space R^n. Matrix-valued problems flatten (X, Y)
/// row-major, X first.
using ProblemPoint = DenseVector;

/// A locally Lipschitz problem together with the local geometry around a
/// candidate local minimum x*: the critical manifold S near x*, its tangent
/// projection, and a Chetaev function. The geometric capabilities are only
/// required to be valid inside U = B(x*, neighborhood_radius()).
///
/// Implementations are immutable after construction, so one oracle may be
/// shared by concurrent trials.
class ProblemOracle {
 public:
  virtual ~ProblemOracle() = default;

  virtual std::string id() const = 0;
  virtual std::size_t dim() const = 0;
  virtual const ProblemPoint& reference_point() const = 0;
  virtual double neighborhood_radius() const = 0;

  virtual double objective(const ProblemPoint& x) const = 0;
  /// One deterministic Clarke subgradient selection at x.
  virtual DenseVector subgradient(const ProblemPoint& x) const = 0;

  virtual double dist_S(const ProblemPoint& x) const = 0;
  virtual ProblemPoint project_S(const ProblemPoint& x) const = 0;
  /// Orthogonal projection of v onto the tangent space T_S(y), y in S.
  virtual DenseVector tangent_project(const ProblemPoint& y, const DenseVector& v) const = 0;
  virtual DenseVector riemannian_grad(const ProblemPoint& y) const = 0;

  virtual double chetaev(const ProblemPoint& x) const = 0;
  /// False for control problems whose chetaev() is only a placeholder.
  virtual bool declares_chetaev() const { return true; }
  virtual double theta1() const = 0;
  /// Coefficient c1 of the increment bound for step size alpha.
  virtual double c1(double alpha) const = 0;

  /// True when the central-difference stencil of half-width h around x may
  /// cross a point where f is not differentiable.
  virtual bool near_nonsmooth_locus(const ProblemPoint& x, double h) const = 0;

  /// A point with objective strictly below f(x*), when the problem knows one.
  virtual std::optional<ProblemPoint> lower_witness() const { return std::nullopt; }

  bool in_neighborhood(const ProblemPoint& x) const {
    return distance(x, reference_point()) <= neighborhood_radius();
  }
};

/// Max over coordinates of |central difference of f - subgradient| at x with
/// step h. Returns nullopt (audit skipped) when x is near the nonsmooth locus.
std::optional<double> validate_subgradient(const ProblemOracle& p, const ProblemPoint& x,
                                           double h);

/// True iff v matches the oracle's selection at x within tol (max norm).
bool membership_check(const ProblemOracle& p, const ProblemPoint& x, const DenseVector& v,
                      double tol);

}  // namespace chetaev
