#pragma once

#include <cstdint>
#include <string_view>

namespace nvs {

// Stream seed for one generated item, from (master seed, sequence id, item ordinal).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view sequence_id, std::uint64_t ordinal);

// SplitMix64. Draws are defined bit-for-bit here rather than through <random> distributions,
// whose outputs differ between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace nvs
