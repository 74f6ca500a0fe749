#include "treequad/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "treequad/error.hpp"

namespace treequad {

std::string_view to_string(LeafOrder order) {
    switch (order) {
        case LeafOrder::volume: return "volume";
        case LeafOrder::contribution: return "contribution";
    }
    return "unknown";
}

LeafOrder parse_leaf_order(std::string_view name) {
    if (name == "volume") return LeafOrder::volume;
    if (name == "contribution") return LeafOrder::contribution;
    throw Error(Errc::invalid_argument, "unknown leaf order '" + std::string(name) + "'");
}

LeafLocator::LeafLocator(std::span<const LeafContribution> leaves) {
    if (leaves.empty()) throw Error(Errc::invalid_input, "no leaves to locate points in");
    dim_ = leaves.front().bounds.dim();
    std::vector<double> lo = leaves.front().bounds.lower();
    std::vector<double> hi = leaves.front().bounds.upper();
    lower_.reserve(leaves.size() * dim_);
    upper_.reserve(leaves.size() * dim_);
    for (const auto& leaf : leaves) {
        if (leaf.bounds.dim() != dim_) throw Error(Errc::invalid_input, "leaf dimension mismatch");
        for (std::size_t d = 0; d < dim_; ++d) {
            lo[d] = std::min(lo[d], leaf.bounds.lower(d));
            hi[d] = std::max(hi[d], leaf.bounds.upper(d));
        }
        lower_.insert(lower_.end(), leaf.bounds.lower().begin(), leaf.bounds.lower().end());
        upper_.insert(upper_.end(), leaf.bounds.upper().begin(), leaf.bounds.upper().end());
    }
    domain_ = Box(std::move(lo), std::move(hi));
}

std::optional<std::size_t> LeafLocator::locate(std::span<const double> x) const {
    if (!domain_.contains(x)) return std::nullopt;
    const std::size_t count = lower_.size() / dim_;
    for (std::size_t i = 0; i < count; ++i) {
        const double* lo = lower_.data() + i * dim_;
        const double* hi = upper_.data() + i * dim_;
        bool inside = true;
        for (std::size_t d = 0; d < dim_ && inside; ++d) {
            inside = x[d] >= lo[d] && (x[d] < hi[d] || (x[d] == hi[d] && hi[d] == domain_.upper(d)));
        }
        if (inside) return i;
    }
    return std::nullopt;
}

std::optional<std::uint64_t> membership(std::span<const double> x,
                                        std::span<const LeafContribution> leaves) {
    const LeafLocator locator(leaves);
    const auto index = locator.locate(x);
    if (!index) return std::nullopt;
    return leaves[*index].leaf_id;
}

std::vector<std::size_t> leaf_order(const IntegralResult& result, LeafOrder order) {
    const auto& leaves = result.contributions;
    std::vector<std::size_t> idx(leaves.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto key = [&](std::size_t i) {
        return order == LeafOrder::volume ? leaves[i].bounds.volume() : std::abs(leaves[i].contribution);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double ka = key(a);
        const double kb = key(b);
        if (ka != kb) return ka > kb;
        return leaves[a].leaf_id < leaves[b].leaf_id;
    });
    return idx;
}

RemovalCurve removal_curve(const IntegralResult& result, const PointSet& posterior, LeafOrder order) {
    const auto& leaves = result.contributions;
    if (leaves.empty()) throw Error(Errc::invalid_input, "result carries no leaf contributions");
    if (posterior.empty()) throw Error(Errc::invalid_input, "no posterior samples");

    const LeafLocator locator(leaves);
    std::vector<std::size_t> hits(leaves.size(), 0);
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        if (const auto leaf = locator.locate(posterior.row(i))) ++hits[*leaf];
    }
    const double n = static_cast<double>(posterior.size());
    const auto sorted = leaf_order(result, order);

    // Retained sums, accumulated from the smallest leaf up.
    const std::size_t count = sorted.size();
    std::vector<double> retained(count + 1, 0.0);
    std::vector<std::size_t> retained_hits(count + 1, 0);
    for (std::size_t k = count; k-- > 0;) {
        retained[k] = retained[k + 1] + leaves[sorted[k]].contribution;
        retained_hits[k] = retained_hits[k + 1] + hits[sorted[k]];
    }
    if (retained_hits[0] == 0) {
        throw Error(Errc::invalid_input, "no posterior sample lies inside the tree domain");
    }

    RemovalCurve curve;
    for (std::size_t i = 0; i < count; ++i) {
        if (retained_hits[i] == 0) break;
        const double fraction = static_cast<double>(retained_hits[i]) / n;
        const double numerator = i == 0 ? result.value : retained[i];
        curve.points.push_back({i, numerator / fraction, fraction});
    }
    return curve;
}

CumulativeCurve cumulative_curve(const IntegralResult& result, LeafOrder order) {
    if (result.contributions.empty()) {
        throw Error(Errc::invalid_input, "result carries no leaf contributions");
    }
    CumulativeCurve curve;
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t i : leaf_order(result, order)) {
        sum += result.contributions[i].contribution;
        curve.points.push_back({++k, sum});
    }
    return curve;
}

SurrogateSample surrogate_sample(const IntegralResult& result, std::size_t n, Rng& rng) {
    const auto& leaves = result.contributions;
    std::vector<double> weights(leaves.size());
    bool negative = false;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        weights[i] = std::max(leaves[i].contribution, 0.0);
        negative = negative || leaves[i].contribution < 0.0;
    }
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw Error(Errc::no_mass, "no leaf has a positive contribution");

    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());

    SurrogateSample out;
    const std::size_t dim = leaves.front().bounds.dim();
    out.locations = PointSet(dim);
    out.locations.reserve(n);
    out.leaf_ids.reserve(n);
    if (negative) out.warnings.emplace_back("negative leaf contributions excluded from selection");

    Point x(dim);
    for (std::size_t s = 0; s < n; ++s) {
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto i = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
        i = std::min(i, leaves.size() - 1);
        while (weights[i] == 0.0 && i > 0) --i;
        uniform_in(leaves[i].bounds, rng, x);
        out.locations.push_back(x);
        out.leaf_ids.push_back(leaves[i].leaf_id);
    }
    return out;
}

}  // namespace treequad
