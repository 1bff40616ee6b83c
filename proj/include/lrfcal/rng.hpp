#pragma once

#include <cstdint>
#include <random>

namespace lrfcal {

// splitmix64, used to derive independent RNG substreams from a base seed
// plus stream tags. Parallel and serial iteration over tagged substreams
// produce identical draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(seed ^ splitmix64(tag));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return mix_seed(mix_seed(seed, tag_a), tag_b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t tag) {
    return std::mt19937_64(mix_seed(seed, tag));
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return std::mt19937_64(mix_seed(seed, tag_a, tag_b));
}

} // namespace lrfcal
