#pragma once

#include <cstdint>
#include <random>

namespace cascade {

/// Seed derivation for independent sub-streams: SplitMix64 finalizer over
/// master + (index+1) * golden gamma. Same (master, index) gives the same
/// seed on every platform.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fully specified by the standard, and all distributions are
/// implemented here rather than via std::*_distribution (those are
/// implementation-defined and would break cross-platform reproducibility).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Consumes exactly two engine outputs
  /// per draw (no caching of the second variate).
  double normal() ;

  /// Uniform integer in [0, n), unbiased via rejection sampling.
  std::uint64_t uniform_below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace cascade
