#include "chetaev/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "chetaev/errors.hpp"

namespace chetaev {

std::optional<double> validate_subgradient(const ProblemOracle& p, const ProblemPoint& x,
                                           double h) {
  if (!(h > 0.0)) throw std::invalid_argument("validate_subgradient: h must be positive");
  if (x.size() != p.dim()) throw ShapeError("validate_subgradient: point dimension mismatch");
  if (p.near_nonsmooth_locus(x, h)) return std::nullopt;

  const DenseVector v = p.subgradient(x);
  std::vector<double> coords(x.entries().begin(), x.entries().end());
  double worst = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double xi = coords[i];
    coords[i] = xi + h;
    const double f_plus = p.objective(DenseVector(coords));
    coords[i] = xi - h;
    const double f_minus = p.objective(DenseVector(coords));
    coords[i] = xi;
    const double fd = (f_plus - f_minus) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - v[i]));
  }
  return worst;
}

bool membership_check(const ProblemOracle& p, const ProblemPoint& x, const DenseVector& v,
                      double tol) {
  if (v.size() != p.dim() || x.size() != p.dim()) return false;
  return norm_inf(subtract(p.subgradient(x), v)) <= tol;
}

}  // namespace chetaev
