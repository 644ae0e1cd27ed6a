#pragma once

#include <cstdint>
#include <initializer_list>

namespace ntnsim {

/// One splitmix64 finalisation step.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-independent child seed for (master, tag...) so drops can run on any worker.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(master);
    for (auto t : tags) s = splitmix64(s ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return s;
}

// Stream tags used when deriving per-drop seeds.
namespace streams {
inline constexpr std::uint64_t kUsers = 1;
inline constexpr std::uint64_t kSlowFading = 2;
inline constexpr std::uint64_t kScintEstimate = 3;
inline constexpr std::uint64_t kScintTransmit = 4;
inline constexpr std::uint64_t kLocation = 5;
inline constexpr std::uint64_t kEstimation = 6;
inline constexpr std::uint64_t kNomaChannel = 7;
inline constexpr std::uint64_t kNomaCluster = 8;
}  // namespace streams

}  // namespace ntnsim
