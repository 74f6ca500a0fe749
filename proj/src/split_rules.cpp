#include "treequad/split_rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "treequad/error.hpp"
#include "treequad/stats.hpp"

namespace treequad {

namespace {

struct Candidate {
    std::size_t dim;
    double threshold;
    double approx_score;
};

/// Threshold separating sorted neighbours a < b. Samples at the threshold go
/// right, so rounding the midpoint up to b still splits between them.
double separating_threshold(double a, double b) {
    const double mid = 0.5 * (a + b);
    return mid > a ? mid : b;
}

bool strictly_inside(const Box& bounds, std::size_t d, double t) {
    return t > bounds.lower(d) && t < bounds.upper(d);
}

}  // namespace

std::string_view to_string(SplitRule rule) {
    switch (rule) {
        case SplitRule::min_sse: return "minsse";
        case SplitRule::kd: return "kd";
        case SplitRule::random: return "random";
    }
    return "unknown";
}

SplitRule parse_split_rule(std::string_view name) {
    if (name == "minsse" || name == "min_sse" || name == "min_sse_axial") return SplitRule::min_sse;
    if (name == "kd") return SplitRule::kd;
    if (name == "random" || name == "random_axial") return SplitRule::random;
    throw Error(Errc::invalid_argument, "unknown split rule '" + std::string(name) + "'");
}

double split_score(const Container& c, const AxialCut& cut) {
    std::vector<double> left;
    std::vector<double> right;
    left.reserve(c.size());
    right.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        (c.X.at(i, cut.dim) < cut.threshold ? left : right).push_back(c.Y[i]);
    }
    return stats::sum_squared_error(left) + stats::sum_squared_error(right);
}

SplitDecision min_sse_axial(const Container& c) {
    const std::size_t n = c.size();
    const std::size_t dims = c.dim();
    if (n < 2) throw Error(Errc::degenerate_container, "min-SSE split needs at least two samples");

    const double ybar = stats::mean(c.Y);
    std::vector<double> centred(n);
    double total1 = 0.0;
    double total2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centred[i] = c.Y[i] - ybar;
        total1 += centred[i];
        total2 += centred[i] * centred[i];
    }

    std::vector<Candidate> candidates;
    candidates.reserve(n * dims);
    std::vector<std::size_t> order(n);
    double best_approx = std::numeric_limits<double>::infinity();

    for (std::size_t d = 0; d < dims; ++d) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return c.X.at(a, d) < c.X.at(b, d);
        });
        double left1 = 0.0;
        double left2 = 0.0;
        for (std::size_t k = 1; k < n; ++k) {
            const double s = centred[order[k - 1]];
            left1 += s;
            left2 += s * s;
            const double a = c.X.at(order[k - 1], d);
            const double b = c.X.at(order[k], d);
            if (!(a < b)) continue;
            const double t = separating_threshold(a, b);
            if (!strictly_inside(c.bounds, d, t)) continue;
            const double nl = static_cast<double>(k);
            const double nr = static_cast<double>(n - k);
            const double right1 = total1 - left1;
            const double right2 = total2 - left2;
            const double score =
                std::max(0.0, left2 - left1 * left1 / nl) + std::max(0.0, right2 - right1 * right1 / nr);
            candidates.push_back({d, t, score});
            best_approx = std::min(best_approx, score);
        }
    }

    if (candidates.empty()) {
        throw Error(Errc::degenerate_container, "no axis has two distinct sample coordinates");
    }

    // Sweep error is O(n eps total2); anything this close may be a true tie.
    const double tolerance = 1e-9 * total2 + std::numeric_limits<double>::min();
    SplitDecision best;
    best.rule = SplitRule::min_sse;
    best.score = std::numeric_limits<double>::infinity();
    for (const auto& cand : candidates) {
        if (cand.approx_score > best_approx + tolerance) continue;
        const AxialCut cut{cand.dim, cand.threshold};
        const double exact = split_score(c, cut);
        if (exact < best.score) {
            best.cut = cut;
            best.score = exact;
            if (exact == 0.0) break;
        }
    }
    return best;
}

SplitDecision kd_split(const Container& c) {
    const std::size_t n = c.size();
    const std::size_t dims = c.dim();
    if (n < 2) throw Error(Errc::degenerate_container, "KD split needs at least two samples");

    std::vector<double> variance(dims);
    std::vector<double> coords(n);
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t i = 0; i < n; ++i) coords[i] = c.X.at(i, d);
        variance[d] = stats::population_variance(coords);
    }
    std::vector<std::size_t> axes(dims);
    std::iota(axes.begin(), axes.end(), std::size_t{0});
    std::stable_sort(axes.begin(), axes.end(),
                     [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });

    for (std::size_t d : axes) {
        for (std::size_t i = 0; i < n; ++i) coords[i] = c.X.at(i, d);
        const auto [lo, hi] = std::minmax_element(coords.begin(), coords.end());
        if (*lo == *hi) continue;
        const double t = stats::median(coords);
        if (!strictly_inside(c.bounds, d, t)) continue;
        const AxialCut cut{d, t};
        return {cut, split_score(c, cut), SplitRule::kd};
    }
    throw Error(Errc::degenerate_container, "no axis admits a KD split");
}

SplitDecision random_axial(const Container& c, Rng& rng) {
    const std::size_t dims = c.dim();
    const auto d = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(dims)), dims - 1);
    const double lo = c.bounds.lower(d);
    const double width = c.bounds.width(d);
    double t = lo;
    for (int attempt = 0; attempt < 64 && !strictly_inside(c.bounds, d, t); ++attempt) {
        t = lo + width * uniform_open01(rng);
    }
    if (!strictly_inside(c.bounds, d, t)) {
        throw Error(Errc::degenerate_container, "container too thin for a random cut");
    }
    const AxialCut cut{d, t};
    return {cut, split_score(c, cut), SplitRule::random};
}

SplitDecision choose_split(const Container& c, SplitRule rule, Rng& rng) {
    switch (rule) {
        case SplitRule::min_sse: return min_sse_axial(c);
        case SplitRule::kd: return kd_split(c);
        case SplitRule::random: return random_axial(c, rng);
    }
    throw Error(Errc::invalid_argument, "unknown split rule");
}

}  // namespace treequad
