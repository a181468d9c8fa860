#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fate {

using Rng = std::mt19937_64;

// splitmix64 finalizer; full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ (mix64(tag) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Fans a root seed out into independent streams. Every random decision in the
// library draws from a seed derived this way, so results are reproducible and
// independent of evaluation order.
template <typename... Tags>
std::uint64_t derive_seed(std::uint64_t root, Tags... tags) {
    std::uint64_t s = mix64(root);
    ((s = combine_seed(s, static_cast<std::uint64_t>(tags))), ...);
    return s;
}

// FNV-1a, used to fold strings (pipeline identities, arm names) into seeds.
inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace fate
