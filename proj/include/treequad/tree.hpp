#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treequad/container.hpp"
#include "treequad/problems.hpp"
#include "treequad/result.hpp"
#include "treequad/sampling.hpp"
#include "treequad/split_rules.hpp"

namespace treequad {

inline constexpr std::size_t kDefaultDepthCap = 200;

/// A container stops splitting as soon as any configured criterion holds.
/// With neither `max_samples` nor `max_variance` set it behaves as
/// max_samples = 1. The depth cap always applies.
struct StoppingCondition {
    std::optional<std::size_t> max_samples;
    /// Population variance of c.Y strictly below this stops the container.
    std::optional<double> max_variance;
    std::size_t depth_cap = kDefaultDepthCap;

    static StoppingCondition samples(std::size_t k);
    static StoppingCondition variance(double threshold);

    void validate() const;
    bool satisfied(const Container& c) const;
};

/// max_samples(1) up to five dimensions; above that also stop once the
/// variance of Y falls below 1e-10 * range(Y0)^2.
StoppingCondition default_stopping(std::size_t dim, std::span<const double> initial_values);

/// One step of tree construction. Active steps carry the sample inserted
/// before the split; a step without a cut re-queued an unsplittable container.
struct SplitRecord {
    ContainerId container = 0;
    std::optional<AxialCut> cut;
    ContainerId left = 0;
    ContainerId right = 0;
    std::optional<Point> inserted;
    double inserted_value = 0.0;

    friend bool operator==(const SplitRecord&, const SplitRecord&) = default;
};

struct Tree {
    Box domain;
    /// Sorted by container id.
    std::vector<Container> leaves;
    SplitRule rule = SplitRule::min_sse;
    std::vector<SplitRecord> build_log;
    std::size_t total_samples = 0;
    std::size_t degenerate_leaves = 0;
    std::size_t depth_capped_leaves = 0;
    std::size_t active_evals = 0;
    std::vector<std::string> warnings;

    std::size_t split_count() const;
};

/// Simple tree quadrature construction: FIFO splitting of the root until
/// every container meets `stop`. Containers the rule cannot split are
/// retired as leaves. `seed` drives the random split rule only.
Tree build_tq_s(const SampleBatch& batch, const Problem& problem, SplitRule rule,
                const StoppingCondition& stop, std::uint64_t seed = 0);

/// Active refinement after `build_tq_s`: `budget` times, pop the container
/// with the widest range of Y (ties: larger volume, then lower id), add one
/// uniform sample inside it, split it and queue both children.
Tree build_tq_a(const SampleBatch& batch, const Problem& problem, SplitRule rule,
                const StoppingCondition& stop, std::size_t budget, std::uint64_t seed = 0);

/// Re-applies a build log to the batch's root container.
Tree replay(const SampleBatch& batch, const Box& domain, SplitRule rule,
            std::span<const SplitRecord> log);

/// Inaccuracy heuristic for active refinement: max(Y) - min(Y), 0 for |Y| <= 1.
double container_inaccuracy(const Container& c);

struct LeafIntegration {
    LeafRule rule = LeafRule::random;
    std::size_t evals_per_leaf = kDefaultLeafEvals;
    /// Random rule only: spread exactly this many evaluations over the
    /// leaves (as evenly as possible, earlier leaves take the remainder)
    /// instead of `evals_per_leaf` each.
    std::optional<std::size_t> total_evals;
    unsigned jobs = 1;
};

/// Sums per-leaf integrals. Leaf i draws from stream `leaf id` under `seed`,
/// so the result does not depend on `jobs`. Mean/median rules fall back to
/// the midpoint rule on empty leaves and record a warning.
IntegralResult integrate_tree(const Tree& tree, const Problem& problem,
                              const LeafIntegration& options, std::uint64_t seed);

}  // namespace treequad
