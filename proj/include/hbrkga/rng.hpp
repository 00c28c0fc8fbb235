#pragma once

/// @file rng.hpp
/// @brief Seeded random streams.
///
/// Every consumer of randomness gets its own stream derived from a master seed
/// and a purpose tag, so the order in which concurrent work completes never
/// changes what any stream produces.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace hbrkga {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// FNV-1a; stable across platforms and runs (unlike std::hash).
inline constexpr std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

namespace detail {
inline constexpr std::uint64_t mix_one(std::uint64_t acc, std::uint64_t v) noexcept {
    return splitmix64(acc ^ splitmix64(v));
}
inline constexpr std::uint64_t mix_one(std::uint64_t acc, std::string_view v) noexcept {
    return mix_one(acc, stable_hash(v));
}
inline constexpr std::uint64_t mix_one(std::uint64_t acc, const char* v) noexcept {
    return mix_one(acc, std::string_view{v});
}
} // namespace detail

/// Combine a master seed with any number of integer or string tags.
template <class... Tags>
constexpr std::uint64_t derive_seed(std::uint64_t master, const Tags&... tags) noexcept {
    std::uint64_t acc = splitmix64(master);
    ((acc = detail::mix_one(acc, tags)), ...);
    return acc;
}

template <class... Tags>
Rng make_stream(std::uint64_t master, const Tags&... tags) {
    return Rng{derive_seed(master, tags...)};
}

/// Uniform draw in [0, 1) with 53 bits of resolution.
inline double unit_draw(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform draw in [lo, hi).
inline double uniform_draw(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * unit_draw(rng);
}

/// Uniform index in [0, n). n must be positive.
inline std::size_t index_draw(Rng& rng, std::size_t n) {
    auto i = static_cast<std::size_t>(unit_draw(rng) * static_cast<double>(n));
    return i < n ? i : n - 1;
}

inline bool bernoulli_draw(Rng& rng, double p) {
    return unit_draw(rng) < p;
}

} // namespace hbrkga
