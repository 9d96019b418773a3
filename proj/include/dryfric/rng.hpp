#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dryfric {

using Rng = std::mt19937_64;

/// Independent, reproducible generator for replica `stream` of run `seed`.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n;
  return n(rng);
}

}  // namespace dryfric
