#pragma once

#include <cstdint>
#include <random>

namespace dqs {

/// SplitMix64 mixing step. Used to derive independent, reproducible stream
/// seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` derived from `master`. Distinct indices give
/// decorrelated engines; the mapping is fixed so runs are reproducible.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(stream_seed(master, index));
}

/// Uniform double in [0, 1) with 53 random bits. Avoids
/// std::uniform_real_distribution, whose output is implementation-defined.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace dqs
