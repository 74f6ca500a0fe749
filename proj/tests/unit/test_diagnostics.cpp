#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "helpers.hpp"
#include "treequad/diagnostics.hpp"
#include "treequad/experiment.hpp"

using namespace treequad;
using testing::error_code;

namespace {

IntegralResult two_leaf_result(double left, double right) {
    IntegralResult r;
    r.contributions.push_back({1, Box({0.0}, {0.5}), left, 0});
    r.contributions.push_back({2, Box({0.5}, {1.0}), right, 0});
    r.value = left + right;
    return r;
}

TreeRun camel_run(std::size_t dim, LeafRule rule, std::uint64_t seed) {
    const Problem p = make_camel(dim);
    MethodParams params;
    params.leaf_rule = rule;
    return run_tree_method(p, Method::tq_s, 12000, params, seed);
}

}  // namespace

TEST_CASE("membership follows the half-open convention") {
    const IntegralResult r = two_leaf_result(1.0, 1.0);
    CHECK(membership(std::vector<double>{0.5}, r.contributions) == 2u);
    CHECK(membership(std::vector<double>{0.0}, r.contributions) == 1u);
    CHECK(membership(std::vector<double>{1.0}, r.contributions) == 2u);
    CHECK_FALSE(membership(std::vector<double>{1.0001}, r.contributions));
    CHECK_FALSE(membership(std::vector<double>{-0.1}, r.contributions));
}

TEST_CASE("random interior points land in exactly one leaf of a built tree") {
    const TreeRun run = camel_run(3, LeafRule::random, 1);
    const auto& leaves = run.result.contributions;
    Rng rng(2);
    for (int i = 0; i < 10000; ++i) {
        const Point x = uniform_in(Box::cube(3, 0.0, 1.0), rng);
        std::size_t hits = 0;
        for (const auto& leaf : leaves) {
            bool inside = true;
            for (std::size_t d = 0; d < 3; ++d) {
                inside = inside && x[d] >= leaf.bounds.lower(d) &&
                         (x[d] < leaf.bounds.upper(d) || (x[d] == 1.0 && leaf.bounds.upper(d) == 1.0));
            }
            hits += inside ? 1 : 0;
        }
        REQUIRE(hits == 1);
        REQUIRE(membership(x, leaves));
    }
}

TEST_CASE("removal curve anchors") {
    const TreeRun run = camel_run(2, LeafRule::random, 3);
    const Problem p = make_camel(2);
    const SampleBatch posterior = sample_mixture_direct(p, 5000, 4);
    const RemovalCurve curve = removal_curve(run.result, posterior.locations);
    REQUIRE_FALSE(curve.points.empty());
    CHECK(curve.points[0].removed == 0);
    CHECK(curve.points[0].estimate == run.result.value);
    CHECK(curve.points[0].retained_fraction == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].retained_fraction <= curve.points[i - 1].retained_fraction);
        CHECK(curve.points[i].retained_fraction > 0.0);
    }

    // A well-calibrated camel fit stays within 10% over the first half.
    const std::size_t half = curve.points.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        CHECK(std::abs(curve.points[i].estimate - p.true_value()) / p.true_value() < 0.10);
    }
}

TEST_CASE("indicator estimate is one for the whole domain and zero for nothing") {
    const IntegralResult r = two_leaf_result(1.0, 3.0);
    PointSet post(1);
    for (double x : {0.1, 0.6, 0.7, 0.99}) post.push_back(std::vector<double>{x});
    const RemovalCurve c = removal_curve(r, post);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0].retained_fraction == 1.0);
    CHECK(c.points[0].estimate == 4.0);
    // Leaves have equal volume, so the lower id goes first.
    CHECK(c.points[1].retained_fraction == 0.75);
    CHECK(c.points[1].estimate == 3.0 / 0.75);
}

TEST_CASE("removal curve errors") {
    const IntegralResult r = two_leaf_result(1.0, 1.0);
    PointSet none(1);
    CHECK(error_code([&] { removal_curve(r, none); }) == Errc::invalid_input);
    PointSet outside(1);
    outside.push_back(std::vector<double>{3.0});
    CHECK(error_code([&] { removal_curve(r, outside); }) == Errc::invalid_input);
    CHECK(error_code([&] { removal_curve(IntegralResult{}, outside); }) == Errc::invalid_input);
}

TEST_CASE("over-weighted outer containers pull the removal curve down") {
    // Median rule on few samples gives large outer leaves the value of their
    // one interior sample, so removing them lowers the estimate.
    const Problem p = make_camel(2);
    MethodParams params;
    params.leaf_rule = LeafRule::median;
    params.stop_max_samples = 1;
    const TreeRun run = run_tree_method(p, Method::tq_s, 400, params, 5);
    const SampleBatch posterior = sample_mixture_direct(p, 20000, 6);
    const RemovalCurve curve = removal_curve(run.result, posterior.locations);
    CHECK(run.result.value > p.true_value());
    CHECK(curve.points[curve.points.size() / 4].estimate < curve.points[0].estimate);
}

TEST_CASE("cumulative curve") {
    const TreeRun run = camel_run(2, LeafRule::random, 7);
    const CumulativeCurve c = cumulative_curve(run.result);
    REQUIRE(c.points.size() == run.result.contributions.size());
    CHECK(std::abs(c.points.back().cumulative - run.result.value) <= 1e-12 * std::abs(run.result.value));
    CHECK(c.points.front().included == 1);
    double largest_step = 0.0;
    double prev = 0.0;
    for (const auto& pt : c.points) {
        largest_step = std::max(largest_step, std::abs(pt.cumulative - prev));
        prev = pt.cumulative;
    }
    CHECK(largest_step < 0.2 * run.result.value);

    IntegralResult single;
    single.contributions.push_back({0, Box::cube(1, 0.0, 1.0), 2.5, 1});
    single.value = 2.5;
    const CumulativeCurve one = cumulative_curve(single);
    REQUIRE(one.points.size() == 1);
    CHECK(one.points[0].included == 1);
    CHECK(one.points[0].cumulative == 2.5);
}

TEST_CASE("cumulative curve of a constant integrand tracks volume") {
    const Problem c = make_constant(Box::cube(2, 0.0, 1.0), 3.0);
    MethodParams params;
    params.sampler = SamplerKind::uniform;
    const TreeRun run = run_tree_method(c, Method::tq_s, 2000, params, 8);
    double volume = 0.0;
    const auto order = leaf_order(run.result, LeafOrder::volume);
    const CumulativeCurve curve = cumulative_curve(run.result);
    for (std::size_t k = 0; k < order.size(); ++k) {
        volume += run.result.contributions[order[k]].bounds.volume();
        CHECK(curve.points[k].cumulative == doctest::Approx(3.0 * volume).epsilon(1e-10));
    }
}

TEST_CASE("surrogate selection is proportional to contribution") {
    const IntegralResult r = two_leaf_result(3.0, 1.0);
    Rng rng(9);
    const std::size_t n = 10000;
    const SurrogateSample s = surrogate_sample(r, n, rng);
    std::size_t first = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = s.locations.at(i, 0);
        if (s.leaf_ids[i] == 1) {
            ++first;
            REQUIRE(x < 0.5);
        } else {
            REQUIRE(x >= 0.5);
        }
    }
    CHECK(std::abs(static_cast<double>(first) / n - 0.75) < 4.0 * oracle::binomial_sd(0.75, n));
    CHECK(s.warnings.empty());
}

TEST_CASE("surrogate draws of a constant integrand are uniform") {
    const Problem c = make_constant(Box::cube(2, 0.0, 1.0), 1.0);
    MethodParams params;
    params.sampler = SamplerKind::uniform;
    const TreeRun run = run_tree_method(c, Method::tq_s, 3000, params, 10);
    Rng rng(11);
    const std::size_t n = 10000;
    const SurrogateSample s = surrogate_sample(run.result, n, rng);
    // One-sample KS critical value at the 1% level: 1.628 / sqrt(n).
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));
    for (std::size_t d = 0; d < 2; ++d) {
        std::vector<double> axis;
        for (std::size_t i = 0; i < n; ++i) axis.push_back(s.locations.at(i, d));
        CHECK(oracle::ks_uniform(axis, 0.0, 1.0) < critical);
    }
}

TEST_CASE("negative contributions are skipped and flagged") {
    const IntegralResult r = two_leaf_result(-1.0, 2.0);
    Rng rng(12);
    const SurrogateSample s = surrogate_sample(r, 500, rng);
    for (auto id : s.leaf_ids) CHECK(id == 2u);
    CHECK(s.warnings.size() == 1);
    const IntegralResult none = two_leaf_result(-1.0, 0.0);
    CHECK(error_code([&] { surrogate_sample(none, 5, rng); }) == Errc::no_mass);
}

TEST_CASE("contribution order is available as an option") {
    IntegralResult r = two_leaf_result(1.0, 5.0);
    const auto order = leaf_order(r, LeafOrder::contribution);
    CHECK(r.contributions[order[0]].leaf_id == 2u);
    CHECK(parse_leaf_order("volume") == LeafOrder::volume);
    CHECK(error_code([] { parse_leaf_order("depth"); }) == Errc::invalid_argument);
}
