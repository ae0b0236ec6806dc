#pragma once

#include <cstdint>

namespace cylwave {

// Counter-based generator: value = mix(seed, counter). Stateless per sample,
// so parallel noise application is order-independent and portable across
// platforms. Identified as "splitmix64-counter" in run manifests.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0,1) from (seed, counter).
inline double counter_uniform01(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t z = splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

/// Uniform double in [-1,1] from (seed, counter).
inline double counter_uniform_pm1(std::uint64_t seed, std::uint64_t counter) {
    return 2.0 * counter_uniform01(seed, counter) - 1.0;
}

inline constexpr const char* kCounterRngName = "splitmix64-counter";

} // namespace cylwave
