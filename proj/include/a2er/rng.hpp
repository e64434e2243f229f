#pragma once

#include <cstdint>
#include <random>

namespace a2er {

// splitmix64; used to derive independent sub-seeds from a root seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed: same (root, a, b) always yields the same seed,
// independent of call order or thread placement.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0) {
    return splitmix64(splitmix64(splitmix64(root) ^ a) ^ b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace a2er
