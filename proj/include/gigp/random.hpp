#pragma once

#include <cstdint>
#include <random>

namespace gigp {

using Rng = std::mt19937_64;

// Uniform on the open interval (0, 1), 53 bits.
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Seeds for replicate r of a run seeded with `seed`.
inline std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t r) { return seed + r; }

}  // namespace gigp
