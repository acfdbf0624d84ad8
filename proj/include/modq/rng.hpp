#pragma once

#include <cstdint>
#include <random>

namespace modq {

using Rng = std::mt19937_64;

// Uniform double in [0,1) with 53 random bits.
inline double uniform_real(Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_real(rng);
}

// Uniform integer in [0,n). Modulo bias is ~n/2^64, far below anything
// the statistical tests can resolve.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    return rng() % n;
}

inline std::uint64_t split_mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable per-task seed for (base, setting, seed-index) triples.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return split_mix64(split_mix64(base ^ 0xd6e8feb86659fd93ULL) ^ split_mix64(a) ^ (b * 0xff51afd7ed558ccdULL + 1));
}

}  // namespace modq
