#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace chronoml {

using Rng = std::mt19937_64;

// splitmix64, used to derive independent sub-seeds from a run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform in [0, 1). Hand-rolled so the byte stream does not depend on the
// standard library's distribution implementation.
inline double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_real(Rng &rng, double lo, double hi) {
    return lo + uniform01(rng) * (hi - lo);
}

// Inclusive bounds. Modulo bias is irrelevant for the ranges used here.
inline long long uniform_int(Rng &rng, long long lo, long long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(rng() % span);
}

// Box-Muller without the cached spare, so a single call consumes a fixed
// amount of RNG state.
inline double normal(Rng &rng, double mean = 0.0, double stddev = 1.0) {
    const double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace chronoml
