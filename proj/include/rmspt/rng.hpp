#pragma once

#include <cstdint>
#include <initializer_list>

#include "rmspt/types.hpp"

namespace rmspt {

/// Stream tags keep independent consumers of one master seed apart.
enum class StreamTag : std::uint64_t {
    Pattern = 0x5041,
    Shots = 0x5348,
    Bootstrap = 0x424f,
    Lanczos = 0x4c41,
    Sweep = 0x5357,
    ErrorScan = 0x4553,
    Twirl = 0x5457,
    Test = 0x5445,
    Monitor = 0x4d4f,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of a sub-stream depends only on
/// the master seed and the path of counters, never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, StreamTag tag,
                                 std::initializer_list<std::uint64_t> path = {}) {
    std::uint64_t h = splitmix64(master ^ splitmix64(static_cast<std::uint64_t>(tag)));
    for (std::uint64_t c : path) {
        h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng make_stream(std::uint64_t master, StreamTag tag,
                       std::initializer_list<std::uint64_t> path = {}) {
    return Rng(derive_seed(master, tag, path));
}

} // namespace rmspt
