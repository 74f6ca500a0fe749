#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "treequad/geometry.hpp"
#include "treequad/problems.hpp"
#include "treequad/random.hpp"

namespace treequad {

/// Sample locations with the integrand value observed at each one.
struct SampleBatch {
    PointSet locations;
    std::vector<double> values;
    /// Draws or proposals generated, including rejected ones.
    std::size_t proposals = 0;
    /// Metropolis only; NaN for independent samplers.
    double acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
};

enum class SamplerKind { uniform, mixture, metropolis };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler(std::string_view name);

struct SamplerConfig {
    SamplerKind kind = SamplerKind::mixture;
    std::size_t n = 1;
    std::uint64_t seed = 0;
    double step = 0.05;
    std::size_t burn_in = 0;
};

/// Contract for third-party samplers.
using Sampler = std::function<SampleBatch(const Problem&, std::size_t, std::uint64_t)>;

inline constexpr std::size_t kMaxConsecutiveRejections = 1'000'000;

SampleBatch sample_uniform(const Problem& problem, std::size_t n, std::uint64_t seed);

/// Draws from the mixture f restricted to the domain: pick a mode uniformly,
/// draw from it, reject and redraw (mode included) when the draw falls
/// outside. With a uniform prior these are exact posterior draws.
SampleBatch sample_mixture_direct(const Problem& problem, std::size_t n, std::uint64_t seed);

/// Random-walk Metropolis on h restricted to the domain, started at the
/// domain centre. The chain has `n` states; the first `burn_in` are dropped.
SampleBatch sample_metropolis(const Problem& problem, std::size_t n, std::uint64_t seed,
                              double step, std::size_t burn_in);

SampleBatch draw_samples(const Problem& problem, const SamplerConfig& config);

/// One truncated-mixture draw into `out`; returns the number of attempts used.
std::size_t draw_truncated_mixture(const GaussianMixtureSpec& spec, const Box& domain, Rng& rng,
                                   std::span<double> out);

}  // namespace treequad
