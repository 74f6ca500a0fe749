#include "treequad/container.hpp"

#include "treequad/error.hpp"
#include "treequad/stats.hpp"

namespace treequad {

void Container::insert(std::span<const double> x, double y) {
    if (!bounds.contains(x)) {
        throw Error(Errc::invalid_argument, "sample lies outside the container");
    }
    X.push_back(x);
    Y.push_back(y);
}

Container make_root(const SampleBatch& batch, const Box& domain, ContainerId id) {
    if (batch.locations.size() != batch.values.size()) {
        throw Error(Errc::invalid_input, "batch locations and values differ in length");
    }
    if (!batch.empty() && batch.locations.dim() != domain.dim()) {
        throw Error(Errc::invalid_dimension, "batch dimension does not match the domain");
    }
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!domain.contains(batch.locations.row(i))) {
            throw Error(Errc::invalid_input, "sample " + std::to_string(i) + " lies outside the domain");
        }
    }
    Container root;
    root.bounds = domain;
    root.X = batch.empty() ? PointSet(domain.dim()) : batch.locations;
    root.Y = batch.values;
    root.id = id;
    return root;
}

std::pair<Container, Container> split(const Container& c, const AxialCut& cut,
                                      ContainerId left_id, ContainerId right_id) {
    if (cut.dim >= c.dim()) throw Error(Errc::invalid_cut, "cut axis out of range");
    const double lo = c.bounds.lower(cut.dim);
    const double hi = c.bounds.upper(cut.dim);
    if (!(cut.threshold > lo && cut.threshold < hi)) {
        throw Error(Errc::invalid_cut, "cut threshold is not strictly inside the container");
    }

    Container left;
    left.bounds = c.bounds.with_upper(cut.dim, cut.threshold);
    left.X = PointSet(c.dim());
    left.depth = c.depth + 1;
    left.id = left_id;

    Container right;
    right.bounds = c.bounds.with_lower(cut.dim, cut.threshold);
    right.X = PointSet(c.dim());
    right.depth = c.depth + 1;
    right.id = right_id;

    for (std::size_t i = 0; i < c.size(); ++i) {
        const auto x = c.X.row(i);
        Container& dst = x[cut.dim] < cut.threshold ? left : right;
        dst.X.push_back(x);
        dst.Y.push_back(c.Y[i]);
    }
    return {std::move(left), std::move(right)};
}

std::string_view to_string(LeafRule rule) {
    switch (rule) {
        case LeafRule::random: return "random";
        case LeafRule::midpoint: return "midpoint";
        case LeafRule::mean: return "mean";
        case LeafRule::median: return "median";
    }
    return "unknown";
}

LeafRule parse_leaf_rule(std::string_view name) {
    if (name == "random") return LeafRule::random;
    if (name == "midpoint") return LeafRule::midpoint;
    if (name == "mean" || name == "mean_y") return LeafRule::mean;
    if (name == "median" || name == "median_y") return LeafRule::median;
    throw Error(Errc::invalid_argument, "unknown leaf integral rule '" + std::string(name) + "'");
}

ContainerIntegral integrate_random(const Container& c, const Problem& problem, std::size_t m,
                                   Rng& rng) {
    if (m == 0) throw Error(Errc::invalid_argument, "random container integral needs m >= 1");
    Point x(c.dim());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        uniform_in(c.bounds, rng, x);
        sum += problem.integrand(x);
    }
    return {c.volume() * (sum / static_cast<double>(m)), m, LeafRule::random};
}

ContainerIntegral integrate_midpoint(const Container& c, const Problem& problem) {
    return {c.volume() * problem.integrand(c.bounds.center()), 1, LeafRule::midpoint};
}

ContainerIntegral integrate_mean_y(const Container& c) {
    if (c.empty()) throw Error(Errc::empty_container, "mean rule on an empty container");
    return {c.volume() * stats::mean(c.Y), 0, LeafRule::mean};
}

ContainerIntegral integrate_median_y(const Container& c) {
    if (c.empty()) throw Error(Errc::empty_container, "median rule on an empty container");
    return {c.volume() * stats::median(c.Y), 0, LeafRule::median};
}

ContainerIntegral integrate_container(const Container& c, const Problem& problem, LeafRule rule,
                                      std::size_t m, Rng& rng) {
    switch (rule) {
        case LeafRule::random: return integrate_random(c, problem, m, rng);
        case LeafRule::midpoint: return integrate_midpoint(c, problem);
        case LeafRule::mean: return integrate_mean_y(c);
        case LeafRule::median: return integrate_median_y(c);
    }
    throw Error(Errc::invalid_argument, "unknown leaf rule");
}

}  // namespace treequad
