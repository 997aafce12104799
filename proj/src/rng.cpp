#include "chetaev/rng.hpp"

#include <cmath>
#include <vector>

namespace chetaev {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return lo + (hi - lo) * uniform();
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

DenseVector Rng::unit_direction(std::size_t n) {
  std::vector<double> d(n);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (double& x : d) {
      x = normal();
      norm_sq += x * x;
    }
  } while (norm_sq == 0.0);
  const double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : d) x *= inv;
  return DenseVector(std::move(d));
}

DenseVector Rng::in_ball(const DenseVector& center, double radius) {
  const DenseVector dir = unit_direction(center.size());
  const double r = radius * std::pow(uniform(), 1.0 / static_cast<double>(center.size()));
  return axpy(r, dir, center);
}

}  // namespace chetaev
