#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mad {

using Rng = std::mt19937_64;

// 64-bit FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// One independent generator per (seed, purpose, index). Outcome tables and
// assignment sampling draw from different purposes so that several designs can
// be replayed against the same potential outcomes.
inline Rng make_stream(std::uint64_t seed, std::string_view purpose,
                       std::uint64_t index = 0) {
  const std::uint64_t tag = fnv1a(purpose);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

// Uniform double in [0, 1) from the top 53 bits; fixed so trajectories do not
// depend on the standard library's uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace mad
