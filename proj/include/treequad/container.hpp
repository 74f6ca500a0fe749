#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "treequad/geometry.hpp"
#include "treequad/problems.hpp"
#include "treequad/random.hpp"
#include "treequad/sampling.hpp"

namespace treequad {

using ContainerId = std::uint64_t;

/// Cut perpendicular to axis `dim` at `threshold`.
struct AxialCut {
    std::size_t dim = 0;
    double threshold = 0.0;

    friend bool operator==(const AxialCut&, const AxialCut&) = default;
};

/// A node of the regression tree: a sub-box with the samples inside it.
struct Container {
    Box bounds;
    PointSet X;
    std::vector<double> Y;
    std::size_t depth = 0;
    ContainerId id = 0;

    std::size_t size() const noexcept { return Y.size(); }
    bool empty() const noexcept { return Y.empty(); }
    std::size_t dim() const noexcept { return bounds.dim(); }
    double volume() const noexcept { return bounds.volume(); }

    /// Adds a sample; it must lie inside `bounds`.
    void insert(std::span<const double> x, double y);
};

/// Root container over `domain` holding every sample of the batch.
Container make_root(const SampleBatch& batch, const Box& domain, ContainerId id = 0);

/// Samples with x[dim] < threshold go left, the rest (ties included) go right.
std::pair<Container, Container> split(const Container& c, const AxialCut& cut,
                                      ContainerId left_id, ContainerId right_id);

enum class LeafRule { random, midpoint, mean, median };

std::string_view to_string(LeafRule rule);
LeafRule parse_leaf_rule(std::string_view name);

struct ContainerIntegral {
    double value = 0.0;
    std::size_t extra_evals = 0;
    LeafRule rule = LeafRule::random;
};

inline constexpr std::size_t kDefaultLeafEvals = 10;

/// volume * mean of `m` fresh evaluations at uniform points of the box.
ContainerIntegral integrate_random(const Container& c, const Problem& problem, std::size_t m,
                                   Rng& rng);
ContainerIntegral integrate_midpoint(const Container& c, const Problem& problem);
ContainerIntegral integrate_mean_y(const Container& c);
ContainerIntegral integrate_median_y(const Container& c);

ContainerIntegral integrate_container(const Container& c, const Problem& problem, LeafRule rule,
                                      std::size_t m, Rng& rng);

}  // namespace treequad
