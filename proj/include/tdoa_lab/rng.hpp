#pragma once

#include <cstdint>
#include <random>

namespace tdoa_lab {

/// splitmix64 finalizer. Used to turn (campaign seed, trial index) pairs into
/// well-mixed per-trial seeds so that parallel and serial runs draw identical
/// streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for trial `index` of a campaign seeded with `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + 1));
}

/// Independent sub-stream of a trial seed (geometry draw, measurement noise,
/// solver init, ... each get their own stream id).
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + 0x632be59bd9b4e019ULL * (stream + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace tdoa_lab
