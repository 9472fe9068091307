#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace toolspin {

// 64-bit FNV-1a. Used for corpus digests, cache keys and mock coin flips;
// stable across platforms and runs.
constexpr uint64_t FNV64_OFFSET = 14695981039346656037ULL;
constexpr uint64_t FNV64_PRIME  = 1099511628211ULL;

inline uint64_t fnv1a64(std::string_view data, uint64_t seed = FNV64_OFFSET) {
    uint64_t h = seed;
    for (unsigned char byte : data) {
        h ^= byte;
        h *= FNV64_PRIME;
    }
    return h;
}

// Finalizer from splitmix64; decorrelates the bits of an FNV hash so that
// individual bits are usable as fair coins.
inline uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string to_hex64(uint64_t value);
uint64_t from_hex64(const std::string & hex);

} // namespace toolspin
