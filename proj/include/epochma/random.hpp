#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace epochma {

/// Default engine for every run. Each run owns one instance seeded from
/// `seed_base + run_index`.
using Rng = std::mt19937_64;

// Draws below avoid std::*_distribution so that trajectories are identical
// across standard library implementations.

/// Uniform double in [0, 1) with 53 random bits.
template <std::uniform_random_bit_generator G>
inline double uniform01(G& gen)
{
    static_assert(G::max() - G::min() == ~std::uint64_t{0}, "64-bit generator required");
    return static_cast<double>((gen() - G::min()) >> 11) * 0x1.0p-53;
}

/// Uniform index in [0, n).
template <std::uniform_random_bit_generator G>
inline std::size_t uniform_index(G& gen, std::size_t n)
{
    const auto x = static_cast<unsigned __int128>(gen() - G::min()) * n;
    return static_cast<std::size_t>(x >> 64);
}

/// Bernoulli trial. Probabilities 0 and 1 are decided without consuming a
/// draw, so disabled operators leave the stream untouched.
template <std::uniform_random_bit_generator G>
inline bool bernoulli(G& gen, double p)
{
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01(gen) < p;
}

} // namespace epochma
