#pragma once

#include <cstdint>

namespace bqmc {

// Counter-based randomness: every value is a pure function of a 64-bit key and
// a counter, so streams can be split by (seed, shift, point) without ordering
// or thread-count dependence. The mixing function is the SplitMix64 finalizer.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives a child key; distinct (parent, tag) pairs give unrelated keys.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t tag) noexcept {
    return mix64(mix64(parent + kGolden) ^ (tag * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t counter_u64(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + (counter + 1) * kGolden);
}

// Uniform in the open interval (0,1) with 53 bits.
constexpr double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t key, std::uint64_t counter) noexcept {
    return to_open_unit(counter_u64(key, counter));
}

}  // namespace bqmc
