#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace glplan {

/// Seeded random stream. Uniform and normal variates are derived from the
/// raw engine output by fixed arithmetic (no library distribution objects),
/// so a seed reproduces the exact same value sequence everywhere.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return (engine_() >> 11) * (1.0 / 9007199254740992.0); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  /// Index drawn according to the given positive weights (need not be
  /// normalized).
  std::size_t weighted_index(const std::vector<double>& weights);

  /// Independent stream derived from this stream's seed lineage.
  RandomStream fork();

 private:
  std::mt19937_64 engine_;
};

/// Stable 64-bit mix for composing seeds from (base, cell, run) tuples.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace glplan
