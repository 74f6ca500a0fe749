#include "treequad/sampling.hpp"

#include <cmath>

#include "treequad/error.hpp"

namespace treequad {

namespace {

void require_count(std::size_t n) {
    if (n == 0) throw Error(Errc::invalid_argument, "sample count must be at least 1");
}

}  // namespace

std::string_view to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::uniform: return "uniform";
        case SamplerKind::mixture: return "mixture";
        case SamplerKind::metropolis: return "metropolis";
    }
    return "unknown";
}

SamplerKind parse_sampler(std::string_view name) {
    if (name == "uniform") return SamplerKind::uniform;
    if (name == "mixture" || name == "mixture_direct") return SamplerKind::mixture;
    if (name == "metropolis") return SamplerKind::metropolis;
    throw Error(Errc::invalid_argument, "unknown sampler '" + std::string(name) + "'");
}

SampleBatch sample_uniform(const Problem& problem, std::size_t n, std::uint64_t seed) {
    require_count(n);
    const Box& domain = problem.domain();
    Rng rng(seed);
    SampleBatch batch;
    batch.locations = PointSet(problem.dim());
    batch.locations.reserve(n);
    batch.values.reserve(n);
    Point x(problem.dim());
    for (std::size_t i = 0; i < n; ++i) {
        uniform_in(domain, rng, x);
        batch.locations.push_back(x);
        batch.values.push_back(problem.integrand(x));
    }
    batch.proposals = n;
    return batch;
}

std::size_t draw_truncated_mixture(const GaussianMixtureSpec& spec, const Box& domain, Rng& rng,
                                   std::span<double> out) {
    const double sigma = std::sqrt(spec.variance);
    const std::size_t modes = spec.means.size();
    for (std::size_t attempt = 1; attempt <= kMaxConsecutiveRejections; ++attempt) {
        const auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(modes));
        const Point& mu = spec.means[std::min(k, modes - 1)];
        for (std::size_t d = 0; d < domain.dim(); ++d) {
            out[d] = mu[d] + sigma * standard_normal(rng);
        }
        if (domain.contains(out)) return attempt;
    }
    throw Error(Errc::sampler_failure, "truncated mixture sampler exceeded the rejection cap");
}

SampleBatch sample_mixture_direct(const Problem& problem, std::size_t n, std::uint64_t seed) {
    require_count(n);
    if (!problem.mixture()) {
        throw Error(Errc::unsupported, "problem '" + problem.name() + "' has no mixture description");
    }
    const auto& spec = *problem.mixture();
    Rng rng(seed);
    SampleBatch batch;
    batch.locations = PointSet(problem.dim());
    batch.locations.reserve(n);
    batch.values.reserve(n);
    Point x(problem.dim());
    for (std::size_t i = 0; i < n; ++i) {
        batch.proposals += draw_truncated_mixture(spec, problem.domain(), rng, x);
        batch.locations.push_back(x);
        batch.values.push_back(problem.integrand(x));
    }
    return batch;
}

SampleBatch sample_metropolis(const Problem& problem, std::size_t n, std::uint64_t seed,
                              double step, std::size_t burn_in) {
    require_count(n);
    if (!(step > 0.0)) throw Error(Errc::invalid_argument, "metropolis step must be positive");
    if (burn_in >= n) {
        throw Error(Errc::empty_batch, "burn-in discards the whole chain");
    }
    const Box& domain = problem.domain();
    Rng rng(seed);

    Point current = domain.center();
    double current_value = problem.integrand(current);
    Point proposal(problem.dim());

    SampleBatch batch;
    batch.locations = PointSet(problem.dim());
    batch.locations.reserve(n - burn_in);
    batch.values.reserve(n - burn_in);

    std::size_t accepted_after_burn_in = 0;
    std::size_t proposed_after_burn_in = 0;
    for (std::size_t state = 0; state < n; ++state) {
        if (state > 0) {
            for (std::size_t d = 0; d < domain.dim(); ++d) {
                proposal[d] = current[d] + step * domain.width(d) * standard_normal(rng);
            }
            const double u = uniform01(rng);
            bool accept = false;
            if (domain.contains(proposal)) {
                const double value = problem.integrand(proposal);
                accept = current_value <= 0.0 || u * current_value < value;
                if (accept) {
                    current.swap(proposal);
                    current_value = value;
                }
            }
            ++batch.proposals;
            if (state >= burn_in) {
                ++proposed_after_burn_in;
                if (accept) ++accepted_after_burn_in;
            }
        }
        if (state >= burn_in) {
            batch.locations.push_back(current);
            batch.values.push_back(current_value);
        }
    }

    batch.acceptance_rate =
        proposed_after_burn_in == 0
            ? 0.0
            : static_cast<double>(accepted_after_burn_in) / static_cast<double>(proposed_after_burn_in);
    if (proposed_after_burn_in > 0 && accepted_after_burn_in == 0) {
        batch.warnings.emplace_back("metropolis chain never moved after burn-in");
    }
    return batch;
}

SampleBatch draw_samples(const Problem& problem, const SamplerConfig& config) {
    switch (config.kind) {
        case SamplerKind::uniform: return sample_uniform(problem, config.n, config.seed);
        case SamplerKind::mixture: return sample_mixture_direct(problem, config.n, config.seed);
        case SamplerKind::metropolis:
            return sample_metropolis(problem, config.n, config.seed, config.step, config.burn_in);
    }
    throw Error(Errc::invalid_argument, "unknown sampler kind");
}

}  // namespace treequad
