#pragma once

#include "pgas/types.hpp"

#include <cstdint>

namespace pgas {

/// xorshift64* generator (Vigna 2016): shifts 12, 25, 27 and output multiplier
/// 0x2545F4914F6CDD1D. The user seed is scrambled through one SplitMix64 step
/// (increment 0x9E3779B97F4A7C15, multipliers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB) so that seed 0 is usable.
///
/// Streams are reproducible within this implementation only.
class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform on {0, ..., bound - 1}; bound > 0.
  std::size_t below(std::size_t bound);
  /// Standard normal via Box-Muller.
  double normal();

  Vector normal_vector(std::size_t n);
  Vector unit_vector(std::size_t n);
  Matrix normal_matrix(std::size_t rows, std::size_t cols);

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pgas
