#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace panelkt {

using Engine = std::mt19937_64;

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent substream key from a root seed and a path of
/// integer labels, e.g. (seed, protocol, panel, row). The result depends only
/// on the values, never on call order, so work can be scheduled freely.
constexpr std::uint64_t substream_key(std::uint64_t seed,
                                      std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = mix64(seed);
    for (std::uint64_t label : path) key = mix64(key ^ mix64(label + 0x632BE59BD9B4E019ULL));
    return key;
}

inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Engine(substream_key(seed, path));
}

// Stream labels shared across modules.
namespace stream {
inline constexpr std::uint64_t permutation = 0x7065726DULL;
inline constexpr std::uint64_t split = 0x73706C74ULL;
inline constexpr std::uint64_t truncate = 0x7472756EULL;
inline constexpr std::uint64_t trial = 0x7472696CULL;
inline constexpr std::uint64_t pilot = 0x70696C74ULL;
}  // namespace stream

}  // namespace panelkt
