#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mxconf {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for an independent stream derived from a parent seed and a stream id.
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t stream) {
    return mix64(mix64(parent) ^ mix64(stream + 0x632BE59BD9B4E019ULL));
}

constexpr std::uint64_t child_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = parent;
    for (std::uint64_t p : path) s = child_seed(s, p);
    return s;
}

}  // namespace mxconf
