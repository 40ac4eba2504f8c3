#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace hmi {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent stream seed for one consumer of a trial seed, so
// adding a consumer never perturbs the streams of the others.
inline constexpr std::uint64_t split_seed(std::uint64_t trial_seed, std::string_view label) {
  return splitmix64(trial_seed ^ splitmix64(fnv1a(label)));
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t trial_seed, std::string_view label) {
  return Rng(split_seed(trial_seed, label));
}

// Uniform draw in [0, 1) that does not depend on the standard library's
// distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller (one draw per call; the cosine branch only).
inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace hmi
