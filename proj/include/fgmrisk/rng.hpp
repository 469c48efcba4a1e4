#pragma once

#include <cstdint>
#include <random>

#include "fgmrisk/numeric.hpp"

namespace fgmrisk {

// Deterministic generator: mt19937_64 with an explicit 53-bit uniform mapping,
// so streams replay bit-exactly for a fixed seed. Substreams are derived by
// SplitMix64 so per-coordinate streams never overlap the scheme stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1), never exactly 0 or 1.
  double next_uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  // Uniform index in {0, ..., n-1}. The modulo bias of ~n/2^64 is irrelevant
  // next to the determinism requirement.
  std::size_t next_below(std::size_t n) {
    return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
  }

  static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (0xda3e39cb94b95bdbull * (stream + 1));
    return num::splitmix64(state);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fgmrisk
