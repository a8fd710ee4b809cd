#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string_view>
#include <vector>

namespace belltree {

// All randomness in the library flows from one master seed through
// derive_seed(). Bounded draws and shuffles are implemented here instead of
// with std::uniform_int_distribution / std::shuffle, whose output is
// implementation-defined; this keeps results identical across toolchains.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t base, uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

// FNV-1a over the role name, then mixed with the base seed.
inline uint64_t derive_seed(uint64_t base, std::string_view role) {
    uint64_t h = 1469598103934665603ULL;
    for (char c : role) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return derive_seed(base, h);
}

using Rng = std::mt19937_64;

inline uint64_t draw_below(Rng& rng, uint64_t n) {
    // Modulo bias is ~n/2^64 here; irrelevant for sampling rows.
    return rng() % n;
}

inline void shuffle_indices(std::vector<size_t>& idx, Rng& rng) {
    for (size_t i = idx.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(draw_below(rng, i));
        std::swap(idx[i - 1], idx[j]);
    }
}

inline std::vector<size_t> shuffled_indices(size_t n, Rng& rng) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t{0});
    shuffle_indices(idx, rng);
    return idx;
}

} // namespace belltree
