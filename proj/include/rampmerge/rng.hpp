/// @file   rampmerge/rng.hpp
/// @brief  Portable random streams.
///
/// @details std::mt19937_64 and std::seed_seq have output sequences fixed by the standard, so
///          they are used as the engine. The std:: distributions are not bit-portable across
///          standard libraries, hence the explicit conversions below.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rampmerge::rng {

/// Stream tags. A stream is identified by (seed, tag, index) so that drawing from one stream never
/// shifts another.
enum class Stream : std::uint32_t {
  Headway = 1,
  Classification = 2,
  DriverTraits = 3,
  KraussNoise = 4,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, Stream tag, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), index};
  return std::mt19937_64(seq);
}

/// Uniform in [0, 1) with 53 bits of resolution.
inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& gen, double low, double high) {
  return low + (high - low) * uniform01(gen);
}

/// Exponential with the given mean via inversion.
inline double exponential(std::mt19937_64& gen, double mean) { return -mean * std::log1p(-uniform01(gen)); }

/// Counter-based uniform in [0, 1): a pure function of (seed, vehicle, step). Lets each vehicle's
/// Krauss noise be independent of how many other vehicles exist or in which order they update.
inline double counter_uniform01(std::uint64_t seed, std::uint64_t vehicle, std::uint64_t step) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed ^ static_cast<std::uint64_t>(Stream::KraussNoise));
  h = mix(h ^ vehicle);
  h = mix(h ^ step);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace rampmerge::rng
