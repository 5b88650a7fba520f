#pragma once

#include <cstdint>
#include <random>

namespace misstab {

std::uint64_t splitmix64(std::uint64_t x);

// Stream seed of replicate r (0-based): splitmix64(seed + golden * (r + 1)).
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r);

// mt19937_64 with a portable double conversion, so streams agree across
// standard libraries (std::uniform_real_distribution does not guarantee it).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Inversion for small means, PTRS (Hoermann 1993) otherwise.
std::int64_t poisson(Rng& rng, double mean);

}  // namespace misstab
