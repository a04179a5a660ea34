#pragma once

#include <cstdint>

namespace ncring {

/// Counter-based SplitMix64: output(i) = mix64(seed + (i + 1) * 0x9E3779B97F4A7C15).
/// This is the same stream as the reference sequential SplitMix64 seeded with
/// `seed`. Test vectors (seed 0): 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4,
/// 0x06c45d188009454f.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t seed, std::uint64_t counter) noexcept
{
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Top 53 bits as a double in [0, 1).
[[nodiscard]] constexpr double to_unit_interval(std::uint64_t bits) noexcept
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Standard normal draw for sample `index` via Box-Muller (cosine branch)
/// over counters 2*index and 2*index + 1.
[[nodiscard]] double standard_normal(std::uint64_t seed, std::uint64_t index) noexcept;

} // namespace ncring
