#include "treequad/tree.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <thread>

#include "treequad/error.hpp"
#include "treequad/stats.hpp"

namespace treequad {

StoppingCondition StoppingCondition::samples(std::size_t k) {
    StoppingCondition s;
    s.max_samples = k;
    return s;
}

StoppingCondition StoppingCondition::variance(double threshold) {
    StoppingCondition s;
    s.max_variance = threshold;
    return s;
}

void StoppingCondition::validate() const {
    if (max_samples && *max_samples == 0) {
        throw Error(Errc::invalid_argument, "max_samples stopping threshold must be positive");
    }
    if (max_variance && !(*max_variance > 0.0)) {
        throw Error(Errc::invalid_argument, "variance stopping threshold must be positive");
    }
    if (depth_cap == 0) throw Error(Errc::invalid_argument, "depth cap must be positive");
}

bool StoppingCondition::satisfied(const Container& c) const {
    if (c.depth >= depth_cap) return true;
    const std::size_t k = max_samples.value_or(max_variance ? 0 : 1);
    if (c.size() <= k) return true;
    if (max_variance) {
        if (c.size() <= 1) return true;
        if (stats::population_variance(c.Y) < *max_variance) return true;
    }
    return false;
}

StoppingCondition default_stopping(std::size_t dim, std::span<const double> initial_values) {
    StoppingCondition stop = StoppingCondition::samples(1);
    if (dim > 5 && !initial_values.empty()) {
        const auto [lo, hi] = std::minmax_element(initial_values.begin(), initial_values.end());
        const double range = *hi - *lo;
        if (range > 0.0) stop.max_variance = 1e-10 * range * range;
    }
    return stop;
}

std::size_t Tree::split_count() const {
    return static_cast<std::size_t>(
        std::count_if(build_log.begin(), build_log.end(), [](const SplitRecord& r) { return r.cut.has_value(); }));
}

double container_inaccuracy(const Container& c) {
    if (c.size() <= 1) return 0.0;
    const auto [lo, hi] = std::minmax_element(c.Y.begin(), c.Y.end());
    return *hi - *lo;
}

namespace {

void check_tiling_step([[maybe_unused]] const Container& parent, [[maybe_unused]] const Container& left,
                       [[maybe_unused]] const Container& right) {
#ifndef NDEBUG
    const double v = parent.volume();
    assert(std::abs(left.volume() + right.volume() - v) <= 1e-10 * v);
    assert(left.size() + right.size() == parent.size());
#endif
}

void sort_leaves(Tree& tree) {
    std::sort(tree.leaves.begin(), tree.leaves.end(),
              [](const Container& a, const Container& b) { return a.id < b.id; });
}

}  // namespace

Tree build_tq_s(const SampleBatch& batch, const Problem& problem, SplitRule rule,
                const StoppingCondition& stop, std::uint64_t seed) {
    if (batch.empty()) throw Error(Errc::empty_input, "tree construction needs at least one sample");
    stop.validate();

    Tree tree;
    tree.domain = problem.domain();
    tree.rule = rule;
    tree.total_samples = batch.size();

    StoppingCondition uncapped = stop;
    uncapped.depth_cap = std::numeric_limits<std::size_t>::max();

    Rng rng(seed);
    ContainerId next_id = 1;
    std::deque<Container> queue;
    queue.push_back(make_root(batch, problem.domain(), 0));

    while (!queue.empty()) {
        Container c = std::move(queue.front());
        queue.pop_front();
        if (stop.satisfied(c)) {
            if (!uncapped.satisfied(c)) ++tree.depth_capped_leaves;
            tree.leaves.push_back(std::move(c));
            continue;
        }
        SplitDecision decision;
        try {
            decision = choose_split(c, rule, rng);
        } catch (const Error& e) {
            if (e.code() != Errc::degenerate_container) throw;
            ++tree.degenerate_leaves;
            tree.leaves.push_back(std::move(c));
            continue;
        }
        const ContainerId left_id = next_id++;
        const ContainerId right_id = next_id++;
        auto [left, right] = split(c, decision.cut, left_id, right_id);
        check_tiling_step(c, left, right);
        tree.build_log.push_back({c.id, decision.cut, left_id, right_id, std::nullopt, 0.0});
        queue.push_back(std::move(left));
        queue.push_back(std::move(right));
    }

    if (tree.depth_capped_leaves > 0) {
        tree.warnings.push_back("depth cap reached by " + std::to_string(tree.depth_capped_leaves) +
                                " containers");
    }
    sort_leaves(tree);
    return tree;
}

namespace {

struct QueueEntry {
    double inaccuracy;
    double volume;
    ContainerId id;
    std::size_t slot;
};

/// Max-heap order: widest range first, then larger volume, then lower id.
struct QueueOrder {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const {
        if (a.inaccuracy != b.inaccuracy) return a.inaccuracy < b.inaccuracy;
        if (a.volume != b.volume) return a.volume < b.volume;
        return a.id > b.id;
    }
};

}  // namespace

Tree build_tq_a(const SampleBatch& batch, const Problem& problem, SplitRule rule,
                const StoppingCondition& stop, std::size_t budget, std::uint64_t seed) {
    Tree tree = build_tq_s(batch, problem, rule, stop, seed);
    if (budget == 0) return tree;

    // Split choices keep the phase-one stream; new sample locations get their own.
    Rng split_rng(stream_seed(seed, 1));
    Rng sample_rng(stream_seed(seed, 2));

    ContainerId next_id = 1;
    for (const auto& rec : tree.build_log) next_id = std::max({next_id, rec.left + 1, rec.right + 1});

    std::vector<Container> pool;
    pool.reserve(tree.leaves.size() + 2 * budget);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> queue;
    auto push = [&](Container c, double inaccuracy) {
        const QueueEntry entry{inaccuracy, c.volume(), c.id, pool.size()};
        pool.push_back(std::move(c));
        queue.push(entry);
    };
    for (auto& leaf : tree.leaves) {
        const double inaccuracy = container_inaccuracy(leaf);
        push(std::move(leaf), inaccuracy);
    }
    tree.leaves.clear();

    Point x(problem.dim());
    for (std::size_t step = 0; step < budget; ++step) {
        const QueueEntry top = queue.top();
        queue.pop();
        Container c = std::move(pool[top.slot]);

        uniform_in(c.bounds, sample_rng, x);
        const double y = problem.integrand(x);
        ++tree.active_evals;
        c.insert(x, y);
        ++tree.total_samples;

        SplitRecord record{c.id, std::nullopt, 0, 0, x, y};
        std::optional<SplitDecision> decision;
        if (c.depth < stop.depth_cap) {
            try {
                decision = choose_split(c, rule, split_rng);
            } catch (const Error& e) {
                if (e.code() != Errc::degenerate_container) throw;
            }
        }
        if (!decision) {
            tree.build_log.push_back(std::move(record));
            push(std::move(c), 0.0);
            continue;
        }
        record.cut = decision->cut;
        record.left = next_id++;
        record.right = next_id++;
        auto [left, right] = split(c, decision->cut, record.left, record.right);
        check_tiling_step(c, left, right);
        tree.build_log.push_back(std::move(record));
        const double left_inaccuracy = container_inaccuracy(left);
        const double right_inaccuracy = container_inaccuracy(right);
        push(std::move(left), left_inaccuracy);
        push(std::move(right), right_inaccuracy);
    }

    while (!queue.empty()) {
        tree.leaves.push_back(std::move(pool[queue.top().slot]));
        queue.pop();
    }
    sort_leaves(tree);
    return tree;
}

Tree replay(const SampleBatch& batch, const Box& domain, SplitRule rule,
            std::span<const SplitRecord> log) {
    Tree tree;
    tree.domain = domain;
    tree.rule = rule;
    tree.total_samples = batch.size();
    tree.build_log.assign(log.begin(), log.end());

    std::map<ContainerId, Container> live;
    live.emplace(0, make_root(batch, domain, 0));
    for (const auto& rec : log) {
        auto it = live.find(rec.container);
        if (it == live.end()) {
            throw Error(Errc::invalid_input, "build log refers to an unknown container");
        }
        if (rec.inserted) {
            it->second.insert(*rec.inserted, rec.inserted_value);
            ++tree.total_samples;
            ++tree.active_evals;
        }
        if (!rec.cut) continue;
        Container parent = std::move(it->second);
        live.erase(it);
        auto [left, right] = split(parent, *rec.cut, rec.left, rec.right);
        live.emplace(rec.left, std::move(left));
        live.emplace(rec.right, std::move(right));
    }
    for (auto& [id, c] : live) tree.leaves.push_back(std::move(c));
    return tree;
}

IntegralResult integrate_tree(const Tree& tree, const Problem& problem,
                              const LeafIntegration& options, std::uint64_t seed) {
    const std::size_t leaves = tree.leaves.size();
    if (leaves == 0) throw Error(Errc::invalid_input, "tree has no leaves");

    std::vector<std::size_t> evals(leaves, options.evals_per_leaf);
    if (options.rule == LeafRule::random) {
        if (options.total_evals) {
            const std::size_t total = *options.total_evals;
            if (total < leaves) {
                throw Error(Errc::budget_exhausted,
                            "leaf budget of " + std::to_string(total) + " cannot cover " +
                                std::to_string(leaves) + " leaves");
            }
            const std::size_t base = total / leaves;
            const std::size_t extra = total % leaves;
            for (std::size_t i = 0; i < leaves; ++i) evals[i] = base + (i < extra ? 1 : 0);
        } else if (options.evals_per_leaf == 0) {
            throw Error(Errc::invalid_argument, "random leaf rule needs at least one evaluation per leaf");
        }
    }

    std::vector<ContainerIntegral> integrals(leaves);
    std::vector<char> fell_back(leaves, 0);
    auto work = [&](std::size_t i) {
        const Container& leaf = tree.leaves[i];
        Rng rng(stream_seed(seed, leaf.id));
        if ((options.rule == LeafRule::mean || options.rule == LeafRule::median) && leaf.empty()) {
            integrals[i] = integrate_midpoint(leaf, problem);
            fell_back[i] = 1;
            return;
        }
        integrals[i] = integrate_container(leaf, problem, options.rule, evals[i], rng);
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(leaves)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < leaves; ++i) work(i);
    } else {
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::thread> workers;
        for (unsigned j = 0; j < jobs; ++j) {
            workers.emplace_back([&, j] {
                try {
                    for (std::size_t i = j; i < leaves; i += jobs) work(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        if (failure) std::rethrow_exception(failure);
    }

    IntegralResult result;
    result.seed = seed;
    result.contributions.reserve(leaves);
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < leaves; ++i) {
        const Container& leaf = tree.leaves[i];
        result.value += integrals[i].value;
        result.evals_leaf_integration += integrals[i].extra_evals;
        result.contributions.push_back({leaf.id, leaf.bounds, integrals[i].value, leaf.size()});
        fallbacks += fell_back[i];
    }
    result.evals_active = tree.active_evals;
    if (fallbacks > 0) {
        result.warnings.push_back(std::to_string(fallbacks) +
                                  " empty leaves integrated with the midpoint rule");
    }
    result.warnings.insert(result.warnings.end(), tree.warnings.begin(), tree.warnings.end());
    return result;
}

}  // namespace treequad
