#pragma once

#include <cstdint>
#include <random>

namespace gridminer {

/// splitmix64 finalizer over (seed, stream): independent per-stream seeds
/// derived from one run seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Unbiased draw in [0, n). std::uniform_int_distribution is not
/// reproducible across standard libraries, this is.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t n) {
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = gen();
    } while (x >= limit);
    return x % n;
}

}  // namespace gridminer
