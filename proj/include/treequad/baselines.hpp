#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "treequad/geometry.hpp"
#include "treequad/problems.hpp"
#include "treequad/random.hpp"
#include "treequad/result.hpp"

namespace treequad {

/// Simple Monte Carlo: mean of f = h / p over i.i.d. draws from the prior.
/// Only uniform priors can be drawn from directly.
IntegralResult smc(const Problem& problem, std::size_t n, std::uint64_t seed);

/// Importance distribution g: a sampler and its normalized density.
struct Proposal {
    std::string name;
    std::function<void(Rng&, std::span<double>)> sample;
    Function density;
};

/// g = p. With the same seed the draws coincide with `smc`.
Proposal prior_proposal(const Problem& problem);

/// g = the problem's mixture truncated to the domain (proportional to h for
/// uniform priors, hence the optimal proposal).
Proposal mixture_proposal(const Problem& problem);

struct ImportanceSamplingResult {
    IntegralResult result;
    std::vector<double> weights;
    /// (sum w)^2 / sum w^2
    double ess = 0.0;
};

/// Z ~ (1/n) sum h(x_i) / g(x_i), x_i ~ g.
/// Throws Errc::invalid_proposal if a draw has g == 0 but h != 0.
ImportanceSamplingResult importance_sampling(const Problem& problem, const Proposal& proposal,
                                             std::size_t n, std::uint64_t seed);

/// Separable per-axis bin edges of the Vegas importance density.
struct VegasGrid {
    std::vector<std::vector<double>> edges;

    static VegasGrid uniform(const Box& domain, std::size_t bins);

    std::size_t dim() const noexcept { return edges.size(); }
    std::size_t bins() const noexcept { return edges.empty() ? 0 : edges.front().size() - 1; }

    /// Edges strictly increasing, end points on the domain, equal bin counts.
    bool valid(const Box& domain) const;

    /// Rebuilds one axis so every new bin holds an equal share of the
    /// damped weights r_i = ((1 - d_i) / -ln d_i)^alpha, where d is the
    /// neighbour-smoothed, normalized per-bin accumulation.
    void refine_axis(std::size_t axis, std::span<const double> accumulated, double alpha);
};

struct VegasOptions {
    std::size_t iterations = 10;
    std::size_t bins = 50;
    double alpha = 1.5;
};

struct VegasResult {
    IntegralResult result;
    std::vector<double> iteration_estimates;
    /// Infinite for iterations that saw only zero integrand values.
    std::vector<double> iteration_variances;
    VegasGrid grid;
};

/// Classic separable Vegas (importance sampling only, no stratification).
/// Iteration estimates are combined with inverse-variance weights; exactly
/// `n_total` integrand evaluations are spent.
VegasResult vegas(const Problem& problem, std::size_t n_total, const VegasOptions& options,
                  std::uint64_t seed);

}  // namespace treequad
