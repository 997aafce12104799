#pragma once

#include <cstdint>
#include <random>

#include "chetaev/linalg.hpp"

namespace chetaev {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// Seed for stream `index` under `master`. Distinct indices give
/// statistically independent mt19937_64 streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Seeded random source. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the distributions below are implemented here
/// rather than taken from <random> so draws are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Standard normal (Marsaglia polar method).
  double normal();
  /// Uniform direction on the unit sphere in R^n.
  DenseVector unit_direction(std::size_t n);
  /// Uniform point in the closed ball of the given radius around center.
  DenseVector in_ball(const DenseVector& center, double radius);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace chetaev
