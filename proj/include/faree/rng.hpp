// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace faree {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for (seed, stream, index). Streams separate kinds of draws
/// so that changing one dimension (e.g. M) leaves the others untouched.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (stream * 0x632be59bd9b4e019ULL));
    s = splitmix64(s ^ (index * 0x85157af5ULL + 0x1234567ULL));
    return std::mt19937_64(s);
}

enum RngStream : std::uint64_t {
    kStreamUserDrops = 1,
    kStreamAngles = 2,
    kStreamShadowing = 3,
    kStreamUserNlos = 4,
    kStreamBsNlos = 5,
    kStreamSrisPhases = 6,
    kStreamStarts = 7,
};

}  // namespace faree
