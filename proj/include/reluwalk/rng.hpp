#pragma once

#include <array>
#include <cstdint>

namespace reluwalk {

/// xoshiro256** seeded through splitmix64.
///
/// Streams are fixed by this file alone: uniform doubles take the top 53 bits
/// of each output, and normals use the Marsaglia polar method on top of them.
/// Nothing here depends on the standard library's distributions, so a seed
/// replays the same network and the same run on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next(); }
  std::uint64_t next() noexcept;

  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept;
  /// Standard normal deviate.
  double normal() noexcept;

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace reluwalk
