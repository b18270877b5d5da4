#pragma once

#include <cstdint>
#include <random>

namespace qforge {

/// Derives an independent 64-bit seed from a master seed and a stream tag.
/// Splitmix64 finalizer; cheap and good enough for decorrelating substreams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator used everywhere randomness is needed. Identical seeds
/// give identical draws on every platform we build for (mt19937_64 is
/// specified bit-exactly by the standard).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : base_(seed), engine_(seed) {}

  double uniform(double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(engine_);
  }

  /// Rademacher draw: +1 or -1 with equal probability.
  int sign() { return (engine_() & 1ULL) ? 1 : -1; }

  std::mt19937_64& engine() { return engine_; }

  /// Child generator for a named substream; independent of the parent's
  /// position, so reordering parent draws never shifts a substream.
  Rng substream(std::uint64_t stream) const { return Rng(derive_seed(base_, stream)); }

 private:
  std::uint64_t base_;
  std::mt19937_64 engine_;
};

}  // namespace qforge
