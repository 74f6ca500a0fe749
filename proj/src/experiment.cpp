#include "treequad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "treequad/error.hpp"
#include "treequad/random.hpp"

namespace treequad {

std::string_view to_string(Method method) {
    switch (method) {
        case Method::smc: return "smc";
        case Method::is: return "is";
        case Method::vegas: return "vegas";
        case Method::tq_s: return "tq-s";
        case Method::tq_a: return "tq-a";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "smc") return Method::smc;
    if (name == "is") return Method::is;
    if (name == "vegas") return Method::vegas;
    if (name == "tq-s" || name == "tqs" || name == "tq_s") return Method::tq_s;
    if (name == "tq-a" || name == "tqa" || name == "tq_a") return Method::tq_a;
    throw Error(Errc::invalid_argument, "unknown method '" + std::string(name) + "'");
}

bool is_tree_method(Method method) { return method == Method::tq_s || method == Method::tq_a; }

void ExperimentConfig::validate() const {
    if (replicates == 0) throw Error(Errc::invalid_argument, "replicates must be at least 1");
    if (budget == 0) throw Error(Errc::invalid_argument, "budget must be at least 1");
    if (dims.empty()) throw Error(Errc::invalid_argument, "at least one dimension is required");
    if (methods.empty()) throw Error(Errc::invalid_argument, "at least one method is required");
    for (std::size_t d : dims) {
        if (d == 0) throw Error(Errc::invalid_dimension, "dimension must be at least 1");
    }
    make_problem(problem, 1);
    if (!(params.active_fraction >= 0.0 && params.active_fraction < 1.0)) {
        throw Error(Errc::invalid_argument, "active fraction must lie in [0, 1)");
    }
    if (params.stop_max_samples && *params.stop_max_samples == 0) {
        throw Error(Errc::invalid_argument, "--stop-max-samples must be positive");
    }
    if (params.stop_variance && !(*params.stop_variance > 0.0)) {
        throw Error(Errc::invalid_argument, "--stop-variance must be positive");
    }
    if (params.leaf_rule == LeafRule::random && params.leaf_evals == 0) {
        throw Error(Errc::invalid_argument, "--leaf-evals must be positive for the random rule");
    }
    if (params.vegas.bins < 2 || params.vegas.iterations == 0) {
        throw Error(Errc::invalid_argument, "vegas needs >= 2 bins and >= 1 iteration");
    }
}

std::uint64_t replicate_seed(std::uint64_t root_seed, std::size_t replicate, std::size_t dim_index,
                             Method method) {
    const std::uint64_t mix = splitmix64(splitmix64(replicate) ^
                                         splitmix64(dim_index + 0x632be59bd9b4e019ULL) ^
                                         fnv1a(to_string(method)));
    return root_seed ^ mix;
}

double percent_error(double estimate, double truth) {
    if (truth == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 100.0 * (estimate - truth) / truth;
}

namespace {

std::size_t evals_per_leaf(const MethodParams& params) {
    switch (params.leaf_rule) {
        case LeafRule::random: return params.leaf_evals;
        case LeafRule::midpoint: return 1;
        case LeafRule::mean:
        case LeafRule::median: return 0;
    }
    return 0;
}

StoppingCondition stopping_for(const MethodParams& params, std::size_t dim,
                               std::span<const double> initial_values) {
    StoppingCondition stop;
    if (!params.stop_max_samples && !params.stop_variance) {
        stop = default_stopping(dim, initial_values);
    } else {
        stop.max_samples = params.stop_max_samples;
        stop.max_variance = params.stop_variance;
    }
    stop.depth_cap = params.depth_cap;
    return stop;
}

}  // namespace

std::pair<std::size_t, std::size_t> tree_budget_split(Method method, std::size_t budget,
                                                      const MethodParams& params) {
    if (!is_tree_method(method)) throw Error(Errc::invalid_argument, "not a tree method");
    // One leaf per tree sample is the expected shape under max_samples(1).
    const std::size_t tree_evals =
        params.budget_includes_leaf_evals ? budget / (1 + evals_per_leaf(params)) : budget;
    std::size_t active = 0;
    if (method == Method::tq_a) {
        active = static_cast<std::size_t>(
            std::llround(params.active_fraction * static_cast<double>(tree_evals)));
    }
    active = std::min(active, tree_evals);
    const std::size_t initial = tree_evals - active;
    if (initial == 0) {
        throw Error(Errc::budget_exhausted, "budget leaves no initial samples for the tree");
    }
    return {initial, active};
}

TreeRun run_tree_method(const Problem& problem, Method method, std::size_t budget,
                        const MethodParams& params, std::uint64_t seed) {
    const auto [initial, active] = tree_budget_split(method, budget, params);
    const std::uint64_t before = problem.evaluations();

    TreeRun run;
    SamplerConfig sampler{params.sampler, initial, stream_seed(seed, 11), params.metropolis_step, 0};
    if (params.sampler == SamplerKind::metropolis) {
        sampler.burn_in = static_cast<std::size_t>(params.metropolis_burn_in * static_cast<double>(initial));
    }
    run.batch = draw_samples(problem, sampler);
    const std::size_t sampling_evals = problem.evaluations() - before;

    const StoppingCondition stop = stopping_for(params, problem.dim(), run.batch.values);
    const std::uint64_t build_seed = stream_seed(seed, 12);
    run.tree = method == Method::tq_s
                   ? build_tq_s(run.batch, problem, params.split, stop, build_seed)
                   : build_tq_a(run.batch, problem, params.split, stop, active, build_seed);

    LeafIntegration leaf;
    leaf.rule = params.leaf_rule;
    leaf.evals_per_leaf = params.leaf_evals;
    leaf.jobs = params.leaf_jobs;
    const std::size_t spent = sampling_evals + run.tree.active_evals;
    if (params.budget_includes_leaf_evals) {
        const std::size_t remaining = budget > spent ? budget - spent : 0;
        if (params.leaf_rule == LeafRule::random) {
            leaf.total_evals = remaining;
        } else if (params.leaf_rule == LeafRule::midpoint && run.tree.leaves.size() > remaining) {
            throw Error(Errc::budget_exhausted, "midpoint rule needs more evaluations than the budget leaves");
        }
    }
    run.result = integrate_tree(run.tree, problem, leaf, stream_seed(seed, 13));
    run.result.method = std::string(to_string(method));
    run.result.seed = seed;
    run.result.evals_sampling = sampling_evals;
    run.result.warnings.insert(run.result.warnings.end(), run.batch.warnings.begin(),
                               run.batch.warnings.end());
    return run;
}

IntegralResult run_method(const Problem& problem, Method method, std::size_t budget,
                          const MethodParams& params, std::uint64_t seed) {
    const std::uint64_t before = problem.evaluations();
    IntegralResult result;
    switch (method) {
        case Method::smc: result = smc(problem, budget, seed); break;
        case Method::is: {
            const Proposal g = problem.mixture() ? mixture_proposal(problem) : prior_proposal(problem);
            result = importance_sampling(problem, g, budget, seed).result;
            break;
        }
        case Method::vegas: result = vegas(problem, budget, params.vegas, seed).result; break;
        case Method::tq_s:
        case Method::tq_a: result = run_tree_method(problem, method, budget, params, seed).result; break;
    }
    const std::uint64_t counted = problem.evaluations() - before;
    if (counted != result.total_evals()) {
        throw Error(Errc::invalid_input, "evaluation ledger mismatch: counter saw " + std::to_string(counted) +
                                             ", result reports " + std::to_string(result.total_evals()));
    }
    return result;
}

RunRecord run_single(const std::string& problem_id, std::size_t dim, std::size_t dim_index,
                     std::size_t replicate, Method method, std::size_t budget,
                     const MethodParams& params, std::uint64_t root_seed) {
    RunRecord rec;
    rec.problem = problem_id;
    rec.method = method;
    rec.dim = dim;
    rec.replicate = replicate;
    rec.budget = budget;
    rec.seed = replicate_seed(root_seed, replicate, dim_index, method);
    const auto start = std::chrono::steady_clock::now();
    try {
        const Problem problem = make_problem(problem_id, dim);
        rec.problem = problem.name();
        rec.true_value = problem.true_value();
        const IntegralResult result = run_method(problem, method, budget, params, rec.seed);
        rec.estimate = result.value;
        rec.percent_error = percent_error(result.value, rec.true_value);
        rec.evals_sampling = result.evals_sampling;
        rec.evals_active = result.evals_active;
        rec.evals_leaf = result.evals_leaf_integration;
        rec.evals_total = result.total_evals();
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = std::string("internal: ") + e.what();
    }
    if (!rec.ok) {
        rec.estimate = std::numeric_limits<double>::quiet_NaN();
        rec.percent_error = std::numeric_limits<double>::quiet_NaN();
    }
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<RunRecord> run_grid(const ExperimentConfig& config) {
    config.validate();
    struct Task {
        std::size_t dim_index;
        Method method;
        std::size_t replicate;
    };
    std::vector<Task> tasks;
    for (Method m : config.methods) {
        for (std::size_t di = 0; di < config.dims.size(); ++di) {
            for (std::size_t r = 0; r < config.replicates; ++r) tasks.push_back({di, m, r});
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            records[i] = run_single(config.problem, config.dims[t.dim_index], t.dim_index, t.replicate,
                                    t.method, config.budget, config.params, config.root_seed);
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(tasks.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
        if (a.problem != b.problem) return a.problem < b.problem;
        if (a.method != b.method) return a.method < b.method;
        if (a.dim != b.dim) return a.dim < b.dim;
        return a.replicate < b.replicate;
    });
    return records;
}

}  // namespace treequad
