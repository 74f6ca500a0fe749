#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "treequad/baselines.hpp"
#include "treequad/container.hpp"
#include "treequad/problems.hpp"
#include "treequad/result.hpp"
#include "treequad/sampling.hpp"
#include "treequad/split_rules.hpp"
#include "treequad/tree.hpp"

namespace treequad {

enum class Method { smc, is, vegas, tq_s, tq_a };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
bool is_tree_method(Method method);

/// Everything a single run needs besides problem, dimension and seed.
struct MethodParams {
    SamplerKind sampler = SamplerKind::mixture;
    SplitRule split = SplitRule::min_sse;
    /// Unset: the dimension-dependent default stopping condition.
    std::optional<std::size_t> stop_max_samples;
    std::optional<double> stop_variance;
    std::size_t depth_cap = kDefaultDepthCap;
    LeafRule leaf_rule = LeafRule::random;
    std::size_t leaf_evals = kDefaultLeafEvals;
    double active_fraction = 0.25;
    /// Leaf-integration evaluations come out of the budget; the initial
    /// sample count shrinks so the total lands on the budget exactly.
    bool budget_includes_leaf_evals = true;
    VegasOptions vegas;
    double metropolis_step = 0.05;
    /// Fraction of the metropolis chain discarded as burn-in.
    double metropolis_burn_in = 0.1;
    unsigned leaf_jobs = 1;
};

struct ExperimentConfig {
    std::string problem = "camel";
    std::vector<std::size_t> dims{1};
    std::vector<Method> methods{Method::tq_s};
    std::size_t budget = 12000;
    std::size_t replicates = 20;
    std::uint64_t root_seed = 2024;
    MethodParams params;
    unsigned jobs = 1;
    std::string output_dir = ".";

    void validate() const;
};

/// Seed of one run: root ^ splitmix64(splitmix64(replicate) ^
/// splitmix64(dim_index + 0x632be59bd9b4e019) ^ fnv1a(method name)).
std::uint64_t replicate_seed(std::uint64_t root_seed, std::size_t replicate, std::size_t dim_index,
                             Method method);

struct RunRecord {
    std::string problem;
    Method method = Method::smc;
    std::size_t dim = 1;
    std::size_t replicate = 0;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    double estimate = 0.0;
    double true_value = 0.0;
    double percent_error = 0.0;
    std::size_t evals_sampling = 0;
    std::size_t evals_active = 0;
    std::size_t evals_leaf = 0;
    std::size_t evals_total = 0;
    std::size_t budget = 0;
    double wall_time_s = 0.0;
};

/// 100 * (estimate - truth) / truth; underestimates are negative.
double percent_error(double estimate, double truth);

/// A tree-method run with everything the diagnostics need.
struct TreeRun {
    SampleBatch batch;
    Tree tree;
    IntegralResult result;
};

/// Budget split for tree methods: returns (initial samples, active evals).
std::pair<std::size_t, std::size_t> tree_budget_split(Method method, std::size_t budget,
                                                      const MethodParams& params);

TreeRun run_tree_method(const Problem& problem, Method method, std::size_t budget,
                        const MethodParams& params, std::uint64_t seed);

/// Runs one method on one problem instance; the problem's evaluation
/// counter is cross-checked against the result's ledger.
IntegralResult run_method(const Problem& problem, Method method, std::size_t budget,
                          const MethodParams& params, std::uint64_t seed);

/// Never throws for a failing run: the record carries the error tag instead.
RunRecord run_single(const std::string& problem_id, std::size_t dim, std::size_t dim_index,
                     std::size_t replicate, Method method, std::size_t budget,
                     const MethodParams& params, std::uint64_t root_seed);

/// Every (dim, method, replicate) cell, sorted by (problem, method, dim,
/// replicate) regardless of how many jobs ran them.
std::vector<RunRecord> run_grid(const ExperimentConfig& config);

// --- reports -------------------------------------------------------------

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_runs_csv(std::istream& in);

/// Config echo as JSON text.
std::string config_json(const ExperimentConfig& config);

struct SummaryRow {
    std::string problem;
    Method method = Method::smc;
    std::size_t dim = 0;
    std::size_t ok = 0;
    std::size_t failed = 0;
    /// NaN when the cell has no successful run.
    double median = 0.0;
    double stdev = 0.0;
};

/// Median and sample standard deviation of percent errors per
/// (problem, method, dim) cell.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
/// Aligned text table, methods as rows and dimensions as columns.
void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows);

struct FigureRow {
    Method method = Method::smc;
    std::size_t dim = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double abs_median = 0.0;
    double abs_q25 = 0.0;
    double abs_q75 = 0.0;
};

/// Per (method, dim) quantiles of signed and absolute percent error over
/// successful runs.
std::vector<FigureRow> figure_rows(const std::vector<RunRecord>& records);

void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows);
/// Two-panel line chart: signed error with IQR band, and |error| on a log axis.
void write_figure_svg(std::ostream& out, const std::vector<FigureRow>& rows, std::string_view title);

/// Writes runs.csv, config.json and summary.{csv,txt} into `dir`.
void write_grid_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const std::vector<RunRecord>& records);

/// Shortest round-trip decimal form.
std::string format_real(double value);

}  // namespace treequad
