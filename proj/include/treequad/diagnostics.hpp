#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treequad/geometry.hpp"
#include "treequad/random.hpp"
#include "treequad/result.hpp"
#include "treequad/sampling.hpp"

namespace treequad {

/// Which containers count as "largest" when ordering leaves.
enum class LeafOrder { volume, contribution };

std::string_view to_string(LeafOrder order);
LeafOrder parse_leaf_order(std::string_view name);

/// Point location over a tiling of leaf boxes. Leaves are half-open
/// [lower, upper) except on the upper faces of the overall domain, which
/// matches the split rule sending threshold ties to the upper child.
class LeafLocator {
public:
    explicit LeafLocator(std::span<const LeafContribution> leaves);

    /// Index into the leaf list, or nullopt outside the domain.
    std::optional<std::size_t> locate(std::span<const double> x) const;

    const Box& domain() const noexcept { return domain_; }

private:
    std::size_t dim_ = 0;
    Box domain_;
    std::vector<double> lower_;
    std::vector<double> upper_;
};

/// Leaf id containing x, or nullopt outside the domain tiled by `leaves`.
std::optional<std::uint64_t> membership(std::span<const double> x,
                                        std::span<const LeafContribution> leaves);

struct RemovalPoint {
    std::size_t removed = 0;
    double estimate = 0.0;
    double retained_fraction = 0.0;
};

struct RemovalCurve {
    std::vector<RemovalPoint> points;
};

/// Re-estimates Z after dropping the i largest leaves: the retained leaf
/// integral divided by the fraction of posterior samples that fall in the
/// retained leaves. Stops before the fraction reaches zero.
RemovalCurve removal_curve(const IntegralResult& result, const PointSet& posterior,
                           LeafOrder order = LeafOrder::volume);

struct CumulativePoint {
    std::size_t included = 0;
    double cumulative = 0.0;
};

struct CumulativeCurve {
    std::vector<CumulativePoint> points;
};

/// Running sum of leaf contributions, largest leaves first.
CumulativeCurve cumulative_curve(const IntegralResult& result, LeafOrder order = LeafOrder::volume);

struct SurrogateSample {
    PointSet locations;
    std::vector<std::uint64_t> leaf_ids;
    std::vector<std::string> warnings;
};

/// Approximate posterior draws from the fitted tree: leaves are chosen with
/// probability proportional to max(contribution, 0), then sampled uniformly.
SurrogateSample surrogate_sample(const IntegralResult& result, std::size_t n, Rng& rng);

/// Leaf indices of `result.contributions`, largest first (ties: lower id).
std::vector<std::size_t> leaf_order(const IntegralResult& result, LeafOrder order);

}  // namespace treequad
