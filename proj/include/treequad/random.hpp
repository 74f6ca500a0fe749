#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

#include "treequad/geometry.hpp"

namespace treequad {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer, used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a hash of a string.
std::uint64_t fnv1a(std::string_view s) noexcept;

/// Seed of an independent stream `stream` under `seed`. Per-leaf streams use
/// the container id as the stream index.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in the open interval (0, 1).
double uniform_open01(Rng& rng);

double standard_normal(Rng& rng);

/// Uniform point in a box; coordinates fill `out` axis by axis.
void uniform_in(const Box& box, Rng& rng, std::span<double> out);
Point uniform_in(const Box& box, Rng& rng);

}  // namespace treequad
