#pragma once

// Counter-based random streams: every variate is a pure function of
// (seed, indices), so parallel generation order cannot change results.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace pslab {

/// splitmix64 finalizer; bijective 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent stream key from a base seed and up to two indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(seed) ^ a) ^ b);
}

namespace detail {
// uniform in (0, 1]: never 0, so log() below is safe
inline double u64_to_unit_open(std::uint64_t x) {
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}
// uniform in [0, 1)
inline double u64_to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}
}  // namespace detail

struct GaussPair {
    double x;
    double y;
};

/// Standard normal pair for matrix entry (j, k) of the stream `seed`,
/// via Box-Muller on two counter-derived uniforms.
inline GaussPair gaussian_entry(std::uint64_t seed, std::uint64_t j, std::uint64_t k) {
    const std::uint64_t key = derive_seed(seed, j, k);
    const double u1 = detail::u64_to_unit_open(mix64(key));
    const double u2 = detail::u64_to_unit(mix64(key ^ 0xD1B54A32D192ED03ull));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace pslab
