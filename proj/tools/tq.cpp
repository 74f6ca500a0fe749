// tq: benchmark grids, summaries, figures and tree diagnostics.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treequad/diagnostics.hpp"
#include "treequad/error.hpp"
#include "treequad/experiment.hpp"

namespace fs = std::filesystem;
using namespace treequad;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitFailedRun = 2;

struct RawParams {
    std::string sampler = "mixture";
    std::string split = "minsse";
    std::string leaf_integral = "random";
    std::optional<std::size_t> stop_max_samples;
    std::optional<double> stop_variance;
    std::size_t depth_cap = kDefaultDepthCap;
    std::size_t leaf_evals = kDefaultLeafEvals;
    double active_fraction = 0.25;
    bool budget_includes_leaf_evals = true;
    std::size_t vegas_bins = VegasOptions{}.bins;
    std::size_t vegas_iters = VegasOptions{}.iterations;
    double vegas_alpha = VegasOptions{}.alpha;
    double metropolis_step = 0.05;
    double metropolis_burn_in = 0.1;
    unsigned leaf_jobs = 1;

    MethodParams resolve() const {
        MethodParams p;
        p.sampler = parse_sampler(sampler);
        p.split = parse_split_rule(split);
        p.leaf_rule = parse_leaf_rule(leaf_integral);
        p.stop_max_samples = stop_max_samples;
        p.stop_variance = stop_variance;
        p.depth_cap = depth_cap;
        p.leaf_evals = leaf_evals;
        p.active_fraction = active_fraction;
        p.budget_includes_leaf_evals = budget_includes_leaf_evals;
        p.vegas.bins = vegas_bins;
        p.vegas.iterations = vegas_iters;
        p.vegas.alpha = vegas_alpha;
        p.metropolis_step = metropolis_step;
        p.metropolis_burn_in = metropolis_burn_in;
        p.leaf_jobs = leaf_jobs;
        return p;
    }
};

void add_method_params(CLI::App* cmd, RawParams& raw) {
    cmd->add_option("--sampler", raw.sampler, "uniform|mixture|metropolis")->capture_default_str();
    cmd->add_option("--split", raw.split, "minsse|kd|random")->capture_default_str();
    cmd->add_option("--stop-max-samples", raw.stop_max_samples, "stop when a container holds <= K samples");
    cmd->add_option("--stop-variance", raw.stop_variance, "stop when the container's Y variance < V");
    cmd->add_option("--depth-cap", raw.depth_cap, "maximum tree depth")->capture_default_str();
    cmd->add_option("--active-fraction", raw.active_fraction, "share of tree evaluations spent actively (tq-a)")
        ->capture_default_str();
    cmd->add_option("--leaf-integral", raw.leaf_integral, "random|midpoint|mean|median")->capture_default_str();
    cmd->add_option("--leaf-evals", raw.leaf_evals, "fresh evaluations per leaf for the random rule")
        ->capture_default_str();
    cmd->add_option("--budget-includes-leaf-evals", raw.budget_includes_leaf_evals,
                    "count leaf-integration evaluations against the budget")
        ->capture_default_str();
    cmd->add_option("--vegas-bins", raw.vegas_bins)->capture_default_str();
    cmd->add_option("--vegas-iters", raw.vegas_iters)->capture_default_str();
    cmd->add_option("--vegas-alpha", raw.vegas_alpha)->capture_default_str();
    cmd->add_option("--metropolis-step", raw.metropolis_step, "proposal sd as a fraction of axis width")
        ->capture_default_str();
    cmd->add_option("--metropolis-burn-in", raw.metropolis_burn_in, "fraction of the chain discarded")
        ->capture_default_str();
    cmd->add_option("--leaf-jobs", raw.leaf_jobs, "threads for leaf integration inside one run")
        ->capture_default_str();
}

std::vector<RunRecord> load_runs(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_input, "cannot open " + path.string());
    return read_runs_csv(in);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::invalid_input, "cannot write " + path.string());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree quadrature benchmarks and diagnostics"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "execute a (method x dimension x replicate) grid");
    ExperimentConfig config;
    std::vector<std::string> method_names{"tq-s"};
    RawParams run_raw;
    bool strict = false;
    run->add_option("--problem", config.problem, "gaussian|camel|quad")->capture_default_str();
    run->add_option("--dims", config.dims, "comma-separated dimensions")->delimiter(',')->capture_default_str();
    run->add_option("--method,--methods", method_names, "smc|is|vegas|tq-s|tq-a, comma-separated")
        ->delimiter(',')
        ->capture_default_str();
    run->add_option("--budget", config.budget, "total integrand evaluations per run")->capture_default_str();
    run->add_option("--replicates", config.replicates)->capture_default_str();
    run->add_option("--seed", config.root_seed, "root seed")->capture_default_str();
    run->add_option("--jobs", config.jobs, "parallel runs")->capture_default_str();
    run->add_option("--out", config.output_dir, "output directory")->capture_default_str();
    run->add_flag("--strict", strict, "exit 2 if any run failed");
    add_method_params(run, run_raw);

    // summarize
    auto* summ = app.add_subcommand("summarize", "median and sd of percent error per cell");
    std::string summ_in;
    std::string summ_out;
    summ->add_option("--in", summ_in, "runs.csv")->required();
    summ->add_option("--out", summ_out, "directory for summary.csv and summary.txt");

    // figure
    auto* fig = app.add_subcommand("figure", "per-dimension error quantiles as CSV and SVG");
    std::string fig_in;
    std::string fig_out = ".";
    std::string fig_problem;
    std::string fig_title;
    fig->add_option("--in", fig_in, "runs.csv")->required();
    fig->add_option("--out", fig_out, "directory for figure.csv and figure.svg")->capture_default_str();
    fig->add_option("--problem", fig_problem, "problem to plot when runs.csv holds several");
    fig->add_option("--title", fig_title);

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "removal curve, cumulative curve and surrogate draws");
    std::string diag_problem = "camel";
    std::size_t diag_dim = 1;
    std::size_t diag_dim_index = 0;
    std::size_t diag_replicate = 0;
    std::string diag_method = "tq-s";
    std::size_t diag_budget = 12000;
    std::uint64_t diag_seed = 2024;
    std::size_t posterior_samples = 10000;
    std::size_t surrogate_samples = 10000;
    std::string removal_order = "volume";
    std::string diag_out = ".";
    RawParams diag_raw;
    diag->add_option("--problem", diag_problem)->capture_default_str();
    diag->add_option("--dim", diag_dim)->capture_default_str();
    diag->add_option("--dim-index", diag_dim_index, "position of --dim in the grid, for seed derivation")
        ->capture_default_str();
    diag->add_option("--replicate", diag_replicate)->capture_default_str();
    diag->add_option("--method", diag_method, "tq-s|tq-a")->capture_default_str();
    diag->add_option("--budget", diag_budget)->capture_default_str();
    diag->add_option("--seed", diag_seed, "root seed")->capture_default_str();
    diag->add_option("--posterior-samples", posterior_samples, "independent posterior batch size")
        ->capture_default_str();
    diag->add_option("--surrogate-samples", surrogate_samples)->capture_default_str();
    diag->add_option("--removal-order", removal_order, "volume|contribution")->capture_default_str();
    diag->add_option("--out", diag_out)->capture_default_str();
    add_method_params(diag, diag_raw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) {
            config.methods.clear();
            for (const auto& m : method_names) config.methods.push_back(parse_method(m));
            config.params = run_raw.resolve();
            config.validate();
            const auto records = run_grid(config);
            write_grid_outputs(config.output_dir, config, records);
            write_summary_text(std::cout, summarize(records));
            std::size_t failed = 0;
            for (const auto& r : records) {
                if (!r.ok) {
                    ++failed;
                    std::cerr << "failed: " << r.problem << ' ' << to_string(r.method) << " dim=" << r.dim
                              << " rep=" << r.replicate << ": " << r.error << '\n';
                }
            }
            return strict && failed > 0 ? kExitFailedRun : 0;
        }

        if (summ->parsed()) {
            const auto rows = summarize(load_runs(summ_in));
            write_summary_text(std::cout, rows);
            if (!summ_out.empty()) {
                fs::create_directories(summ_out);
                auto csv = open_out(fs::path(summ_out) / "summary.csv");
                write_summary_csv(csv, rows);
                auto txt = open_out(fs::path(summ_out) / "summary.txt");
                write_summary_text(txt, rows);
            }
            return 0;
        }

        if (fig->parsed()) {
            auto records = load_runs(fig_in);
            std::set<std::string> problems;
            for (const auto& r : records) problems.insert(r.problem);
            if (!fig_problem.empty()) {
                std::erase_if(records, [&](const RunRecord& r) { return r.problem != fig_problem; });
                if (records.empty()) throw Error(Errc::invalid_input, "no runs for problem " + fig_problem);
            } else if (problems.size() > 1) {
                throw Error(Errc::invalid_argument, "runs.csv holds several problems; pick one with --problem");
            }
            const auto rows = figure_rows(records);
            const std::string title =
                !fig_title.empty() ? fig_title : (records.empty() ? "" : records.front().problem);
            fs::create_directories(fig_out);
            auto csv = open_out(fs::path(fig_out) / "figure.csv");
            write_figure_csv(csv, rows);
            auto svg = open_out(fs::path(fig_out) / "figure.svg");
            write_figure_svg(svg, rows, title);
            return 0;
        }

        if (diag->parsed()) {
            const Method method = parse_method(diag_method);
            if (!is_tree_method(method)) {
                throw Error(Errc::invalid_argument, "diagnose needs a tree method (tq-s or tq-a)");
            }
            const MethodParams params = diag_raw.resolve();
            const LeafOrder order = parse_leaf_order(removal_order);
            const Problem problem = make_problem(diag_problem, diag_dim);
            const std::uint64_t seed = replicate_seed(diag_seed, diag_replicate, diag_dim_index, method);

            TreeRun tree_run;
            try {
                tree_run = run_tree_method(problem, method, diag_budget, params, seed);
            } catch (const Error& e) {
                std::cerr << "run failed: " << to_string(e.code()) << ": " << e.what() << '\n';
                return kExitFailedRun;
            }
            const SampleBatch posterior = draw_samples(
                problem, SamplerConfig{SamplerKind::mixture, posterior_samples, stream_seed(seed, 21), 0.05, 0});
            const auto removal = removal_curve(tree_run.result, posterior.locations, order);
            const auto cumulative = cumulative_curve(tree_run.result, order);
            Rng rng(stream_seed(seed, 22));
            const auto surrogate = surrogate_sample(tree_run.result, surrogate_samples, rng);

            fs::create_directories(diag_out);
            {
                auto out = open_out(fs::path(diag_out) / "removal_curve.csv");
                out << "i,z_i,retained_fraction\n";
                for (const auto& p : removal.points) {
                    out << p.removed << ',' << format_real(p.estimate) << ','
                        << format_real(p.retained_fraction) << '\n';
                }
            }
            {
                auto out = open_out(fs::path(diag_out) / "cumulative_curve.csv");
                out << "k,cumulative\n";
                for (const auto& p : cumulative.points) out << p.included << ',' << format_real(p.cumulative) << '\n';
            }
            {
                auto out = open_out(fs::path(diag_out) / "surrogate_samples.csv");
                for (std::size_t d = 0; d < diag_dim; ++d) out << 'x' << d << ',';
                out << "leaf_id\n";
                for (std::size_t i = 0; i < surrogate.locations.size(); ++i) {
                    for (double v : surrogate.locations.row(i)) out << format_real(v) << ',';
                    out << surrogate.leaf_ids[i] << '\n';
                }
            }
            for (const auto& w : tree_run.result.warnings) std::cerr << "warning: " << w << '\n';
            for (const auto& w : surrogate.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << "estimate " << format_real(tree_run.result.value) << " truth "
                      << format_real(problem.true_value()) << " leaves " << tree_run.result.contributions.size()
                      << '\n';
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
