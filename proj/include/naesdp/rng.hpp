#pragma once

#include <cstdint>
#include <random>

namespace naesdp {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Deterministic sub-seed for stream `stream` of `seed`. Distinct streams give
/// statistically independent generators, so work can be split across threads
/// without changing results.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Thin wrapper over mt19937_64. Bounded integers and normals are computed here
// rather than through <random> distributions, whose algorithms are
// implementation-defined; this keeps outputs bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double uniform();

  /// Uniform +1 / -1.
  int sign() { return (engine_() >> 63) ? 1 : -1; }

  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace naesdp
