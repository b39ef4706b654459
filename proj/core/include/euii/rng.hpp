#pragma once

#include <cstdint>
#include <random>

namespace euii {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for replication `index` of stream `stream_id` under `master`.
/// Depends only on the three inputs, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id, std::uint64_t index)
{
    return splitmix64(splitmix64(splitmix64(master) ^ stream_id) ^ index);
}

inline Engine make_stream(std::uint64_t master, std::uint64_t stream_id, std::uint64_t index)
{
    return Engine(derive_seed(master, stream_id, index));
}

}  // namespace euii
