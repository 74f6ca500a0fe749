#include "treequad/random.hpp"

#include <cmath>
#include <numbers>

namespace treequad {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

double uniform_open01(Rng& rng) {
    double u = 0.0;
    do {
        u = uniform01(rng);
    } while (u == 0.0);
    return u;
}

double standard_normal(Rng& rng) {
    // Box-Muller keeps streams identical across standard library vendors.
    const double u1 = uniform_open01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void uniform_in(const Box& box, Rng& rng, std::span<double> out) {
    for (std::size_t d = 0; d < box.dim(); ++d) {
        out[d] = box.lower(d) + box.width(d) * uniform01(rng);
    }
}

Point uniform_in(const Box& box, Rng& rng) {
    Point x(box.dim());
    uniform_in(box, rng, x);
    return x;
}

}  // namespace treequad
