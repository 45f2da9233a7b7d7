#pragma once

#include <cstdint>
#include <random>

namespace qb {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for (seed, index); generation order does not matter.
inline Engine stream_engine(std::uint64_t seed, std::uint64_t index) {
  return Engine(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

/// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
inline double uniform01(Engine& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform01_open_low(Engine& g) { return 1.0 - uniform01(g); }

}  // namespace qb
