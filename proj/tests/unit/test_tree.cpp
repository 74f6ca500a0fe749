#include <doctest.h>

#include <cmath>
#include <set>

#include "helpers.hpp"
#include "treequad/tree.hpp"

using namespace treequad;
using testing::error_code;

namespace {

double leaf_volume_sum(const Tree& t) {
    double v = 0.0;
    for (const auto& leaf : t.leaves) v += leaf.volume();
    return v;
}

std::size_t leaf_sample_sum(const Tree& t) {
    std::size_t n = 0;
    for (const auto& leaf : t.leaves) n += leaf.size();
    return n;
}

}  // namespace

TEST_CASE("stopping conditions") {
    Container c;
    c.bounds = Box::cube(1, 0.0, 1.0);
    c.X = PointSet(1);
    c.insert(std::vector<double>{0.1}, 1.0);
    c.insert(std::vector<double>{0.2}, 1.0 + 1e-9);
    CHECK_FALSE(StoppingCondition::samples(1).satisfied(c));
    CHECK(StoppingCondition::samples(2).satisfied(c));
    CHECK(StoppingCondition::variance(1e-12).satisfied(c));
    CHECK_FALSE(StoppingCondition::variance(1e-20).satisfied(c));
    c.depth = 5;
    StoppingCondition capped = StoppingCondition::samples(1);
    capped.depth_cap = 5;
    CHECK(capped.satisfied(c));

    CHECK(error_code([] { StoppingCondition::samples(0).validate(); }) == Errc::invalid_argument);
    CHECK(error_code([] { StoppingCondition::variance(-1.0).validate(); }) == Errc::invalid_argument);

    const std::vector<double> y0{0.0, 4.0};
    CHECK(default_stopping(5, y0).max_samples == 1u);
    CHECK_FALSE(default_stopping(5, y0).max_variance);
    CHECK(default_stopping(6, y0).max_samples == 1u);
    CHECK(*default_stopping(6, y0).max_variance == doctest::Approx(1.6e-9));
}

TEST_CASE("single sample produces the root as the only leaf") {
    const Problem p = make_camel(2);
    const SampleBatch b = sample_uniform(p, 1, 1);
    const Tree t = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(1));
    CHECK(t.leaves.size() == 1);
    CHECK(t.split_count() == 0);
    CHECK(t.leaves[0].bounds == p.domain());
}

TEST_CASE("empty batch is rejected") {
    const Problem p = make_camel(1);
    SampleBatch empty;
    empty.locations = PointSet(1);
    CHECK(error_code([&] { build_tq_s(empty, p, SplitRule::kd, StoppingCondition::samples(1)); }) ==
          Errc::empty_input);
}

TEST_CASE("camel dim 2 with 8000 mixture samples splits to single-sample leaves") {
    const Problem p = make_camel(2);
    const SampleBatch b = sample_mixture_direct(p, 8000, 77);
    const Tree t = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(1));
    std::size_t empty = 0;
    for (const auto& leaf : t.leaves) {
        REQUIRE(leaf.size() <= 1);
        if (leaf.empty()) ++empty;
    }
    CHECK(t.split_count() >= 7999);
    CHECK(t.leaves.size() == 8000 + empty);
    CHECK(t.leaves.size() == t.split_count() + 1);
    CHECK(t.total_samples == 8000);
    CHECK(leaf_sample_sum(t) == 8000);
    CHECK(std::abs(leaf_volume_sum(t) - 1.0) < 1e-10);

    const Tree again = replay(b, p.domain(), SplitRule::min_sse, t.build_log);
    REQUIRE(again.leaves.size() == t.leaves.size());
    for (std::size_t i = 0; i < t.leaves.size(); ++i) {
        CHECK(again.leaves[i].bounds == t.leaves[i].bounds);
        CHECK(again.leaves[i].id == t.leaves[i].id);
    }
}

TEST_CASE("max_samples(k) bounds every non-degenerate leaf") {
    const Problem p = make_gaussian(3);
    const SampleBatch b = sample_mixture_direct(p, 1500, 5);
    for (auto rule : {SplitRule::min_sse, SplitRule::kd, SplitRule::random}) {
        const Tree t = build_tq_s(b, p, rule, StoppingCondition::samples(7), 3);
        std::size_t over = 0;
        for (const auto& leaf : t.leaves) over += leaf.size() > 7 ? 1 : 0;
        CHECK(over <= t.degenerate_leaves + t.depth_capped_leaves);
        CHECK(leaf_sample_sum(t) == 1500);
    }
}

TEST_CASE("duplicate samples become degenerate leaves") {
    const Problem p = make_camel(1);
    SampleBatch b;
    b.locations = PointSet(1);
    for (int i = 0; i < 3; ++i) {
        b.locations.push_back(std::vector<double>{0.4});
        b.values.push_back(static_cast<double>(i));
    }
    b.locations.push_back(std::vector<double>{0.9});
    b.values.push_back(5.0);
    const Tree t = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(1));
    CHECK(t.leaves.size() == 2);
    CHECK(t.degenerate_leaves == 1);
}

TEST_CASE("depth cap stops a run of splits and is recorded") {
    const Problem p = make_camel(1);
    const SampleBatch b = sample_uniform(p, 200, 2);
    StoppingCondition stop = StoppingCondition::samples(1);
    stop.depth_cap = 3;
    const Tree t = build_tq_s(b, p, SplitRule::min_sse, stop);
    for (const auto& leaf : t.leaves) CHECK(leaf.depth <= 3);
    CHECK(t.depth_capped_leaves > 0);
    CHECK(t.leaves.size() <= 8);
}

TEST_CASE("tq-a with zero budget equals tq-s") {
    const Problem p = make_camel(2);
    const SampleBatch b = sample_mixture_direct(p, 300, 9);
    const Tree s = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(1), 4);
    const Tree a = build_tq_a(b, p, SplitRule::min_sse, StoppingCondition::samples(1), 0, 4);
    CHECK(a.build_log == s.build_log);
    CHECK(a.leaves.size() == s.leaves.size());
    CHECK(a.active_evals == 0);
}

TEST_CASE("tq-a spends exactly its budget and replays") {
    const Problem p = make_camel(5);
    const SampleBatch b = sample_mixture_direct(p, 9000, 10);
    const auto before = p.evaluations();
    const Tree t = build_tq_a(b, p, SplitRule::min_sse, StoppingCondition::samples(1), 3000, 11);
    CHECK(p.evaluations() - before == 3000);
    CHECK(t.active_evals == 3000);
    CHECK(t.total_samples == 12000);
    CHECK(leaf_sample_sum(t) == 12000);
    CHECK(std::abs(leaf_volume_sum(t) - 1.0) < 1e-10);

    const Tree again = replay(b, p.domain(), SplitRule::min_sse, t.build_log);
    REQUIRE(again.leaves.size() == t.leaves.size());
    for (std::size_t i = 0; i < t.leaves.size(); ++i) {
        CHECK(again.leaves[i].bounds == t.leaves[i].bounds);
        CHECK(again.leaves[i].Y == t.leaves[i].Y);
    }
}

TEST_CASE("tq-a pops containers in priority order") {
    const Problem p = make_camel(2);
    const SampleBatch b = sample_mixture_direct(p, 400, 12);
    const Tree s = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(2));
    double top = 0.0;
    for (const auto& leaf : s.leaves) top = std::max(top, container_inaccuracy(leaf));

    const Tree a = build_tq_a(b, p, SplitRule::min_sse, StoppingCondition::samples(2), 1);
    const auto& step = a.build_log.back();
    REQUIRE(step.inserted);
    std::optional<double> popped;
    for (const auto& leaf : s.leaves) {
        if (leaf.id == step.container) popped = container_inaccuracy(leaf);
    }
    REQUIRE(popped);
    CHECK(*popped == top);
}

TEST_CASE("tq-a on a constant integrand refines the largest container first") {
    const Problem c = make_constant(Box::cube(2, 0.0, 1.0), 2.0);
    const SampleBatch b = sample_uniform(c, 5, 3);
    const Tree s = build_tq_s(b, c, SplitRule::kd, StoppingCondition::samples(1));
    const Container* largest = &s.leaves.front();
    for (const auto& leaf : s.leaves) {
        if (leaf.volume() > largest->volume()) largest = &leaf;
    }
    const Tree a = build_tq_a(b, c, SplitRule::kd, StoppingCondition::samples(1), 1);
    CHECK(a.build_log.back().container == largest->id);
}

TEST_CASE("container inaccuracy is the range of Y") {
    Container c;
    c.bounds = Box::cube(1, 0.0, 1.0);
    c.X = PointSet(1);
    CHECK(container_inaccuracy(c) == 0.0);
    c.insert(std::vector<double>{0.1}, 4.0);
    CHECK(container_inaccuracy(c) == 0.0);
    c.insert(std::vector<double>{0.2}, -1.0);
    c.insert(std::vector<double>{0.3}, 2.0);
    CHECK(container_inaccuracy(c) == 5.0);
}

TEST_CASE("integrate_tree sums leaves and records contributions") {
    const Problem p = make_camel(2);
    const SampleBatch b = sample_mixture_direct(p, 500, 14);
    const Tree t = build_tq_s(b, p, SplitRule::min_sse, StoppingCondition::samples(1));
    const auto before = p.evaluations();
    const IntegralResult r = integrate_tree(t, p, LeafIntegration{}, 15);
    CHECK(p.evaluations() - before == 10 * t.leaves.size());
    CHECK(r.evals_leaf_integration == 10 * t.leaves.size());
    REQUIRE(r.contributions.size() == t.leaves.size());
    double sum = 0.0;
    for (const auto& c : r.contributions) sum += c.contribution;
    CHECK(std::abs(sum - r.value) <= 1e-12 * std::abs(r.value));

    LeafIntegration parallel;
    parallel.jobs = 4;
    CHECK(integrate_tree(t, p, parallel, 15).value == r.value);

    LeafIntegration fixed_total;
    fixed_total.total_evals = 3 * t.leaves.size() + 2;
    const IntegralResult spread = integrate_tree(t, p, fixed_total, 15);
    CHECK(spread.evals_leaf_integration == 3 * t.leaves.size() + 2);
    fixed_total.total_evals = t.leaves.size() - 1;
    CHECK(error_code([&] { integrate_tree(t, p, fixed_total, 15); }) == Errc::budget_exhausted);
}

TEST_CASE("two-leaf hand tree, midpoint rule on h(x) = x") {
    const Problem linear("linear", Box::cube(1, 0.0, 1.0), [](std::span<const double> x) { return x[0]; },
                         [](std::span<const double>) { return 1.0; }, 0.5);
    SampleBatch b;
    b.locations = PointSet(1);
    b.locations.push_back(std::vector<double>{0.25});
    b.values.push_back(0.25);
    b.locations.push_back(std::vector<double>{0.75});
    b.values.push_back(0.75);
    const Tree t = build_tq_s(b, linear, SplitRule::min_sse, StoppingCondition::samples(1));
    REQUIRE(t.leaves.size() == 2);
    const IntegralResult r = integrate_tree(t, linear, LeafIntegration{LeafRule::midpoint, 1, {}, 1}, 0);
    CHECK(r.value == 0.5);
}

TEST_CASE("mean and median rules fall back on empty leaves") {
    const Problem p = make_camel(1);
    SampleBatch b;
    b.locations = PointSet(1);
    for (double x : {0.1, 0.2}) {
        b.locations.push_back(std::vector<double>{x});
        b.values.push_back(p.integrand(std::vector<double>{x}));
    }
    Tree t = build_tq_s(b, p, SplitRule::random, StoppingCondition::samples(1), 21);
    bool has_empty = false;
    for (const auto& leaf : t.leaves) has_empty = has_empty || leaf.empty();
    REQUIRE(has_empty);
    const IntegralResult r = integrate_tree(t, p, LeafIntegration{LeafRule::median, 0, {}, 1}, 0);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("constant integrand is exact for every rule and builder") {
    const Box domain = Box::cube(4, -1.0, 1.0);
    const Problem c = make_constant(domain, 3.5);
    const SampleBatch b = sample_uniform(c, 300, 1);
    for (auto split_rule : {SplitRule::min_sse, SplitRule::kd, SplitRule::random}) {
        for (bool active : {false, true}) {
            const Tree t = active ? build_tq_a(b, c, split_rule, StoppingCondition::samples(1), 50, 2)
                                  : build_tq_s(b, c, split_rule, StoppingCondition::samples(1), 2);
            for (auto leaf_rule : {LeafRule::random, LeafRule::midpoint, LeafRule::mean, LeafRule::median}) {
                const IntegralResult r = integrate_tree(t, c, LeafIntegration{leaf_rule, 10, {}, 1}, 3);
                CHECK(std::abs(r.value - c.true_value()) <= 1e-10 * c.true_value());
            }
        }
    }
}
