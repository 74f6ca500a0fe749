#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "treequad/experiment.hpp"
#include "treequad/stats.hpp"

using namespace treequad;
using testing::error_code;

namespace {

RunRecord record(Method m, std::size_t dim, double err, bool ok = true) {
    RunRecord r;
    r.problem = "camel";
    r.method = m;
    r.dim = dim;
    r.percent_error = ok ? err : std::nan("");
    r.ok = ok;
    return r;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    c.replicates = 0;
    CHECK(error_code([&] { c.validate(); }) == Errc::invalid_argument);
    c = {};
    c.budget = 0;
    CHECK(error_code([&] { c.validate(); }) == Errc::invalid_argument);
    c = {};
    c.dims.clear();
    CHECK(error_code([&] { c.validate(); }) == Errc::invalid_argument);
    c = {};
    c.problem = "banana";
    CHECK(error_code([&] { c.validate(); }) == Errc::invalid_argument);
}

TEST_CASE("seed rule") {
    const std::uint64_t expected =
        7 ^ splitmix64(splitmix64(3) ^ splitmix64(1 + 0x632be59bd9b4e019ULL) ^ fnv1a("tq-a"));
    CHECK(replicate_seed(7, 3, 1, Method::tq_a) == expected);
    CHECK(replicate_seed(7, 3, 1, Method::tq_a) != replicate_seed(7, 3, 1, Method::tq_s));
}

TEST_CASE("percent error sign convention") {
    CHECK(percent_error(0.9, 1.0) == doctest::Approx(-10.0));
    CHECK(percent_error(2.0, 1.0) == 100.0);
    CHECK(std::isnan(percent_error(1.0, 0.0)));
}

TEST_CASE("tree budget accounting") {
    MethodParams p;
    p.budget_includes_leaf_evals = false;
    CHECK(tree_budget_split(Method::tq_a, 12000, p) == std::pair<std::size_t, std::size_t>{9000, 3000});
    CHECK(tree_budget_split(Method::tq_s, 12000, p) == std::pair<std::size_t, std::size_t>{12000, 0});
    p.budget_includes_leaf_evals = true;
    CHECK(tree_budget_split(Method::tq_s, 12000, p).first == 1090);
    p.leaf_rule = LeafRule::median;
    CHECK(tree_budget_split(Method::tq_s, 12000, p).first == 12000);
}

TEST_CASE("tq-a grid cell with the 9000/3000 split") {
    ExperimentConfig c;
    c.problem = "camel";
    c.dims = {5};
    c.methods = {Method::tq_a};
    c.replicates = 1;
    c.params.budget_includes_leaf_evals = false;
    const auto records = run_grid(c);
    REQUIRE(records.size() == 1);
    CHECK(records[0].ok);
    CHECK(records[0].evals_sampling == 9000);
    CHECK(records[0].evals_active <= 3000);
}

TEST_CASE("tree runs hit the budget exactly and the ledger adds up") {
    for (Method m : {Method::tq_s, Method::tq_a}) {
        for (std::size_t dim : {1u, 6u}) {
            const Problem p = make_gaussian(dim);
            const auto before = p.evaluations();
            const IntegralResult r = run_method(p, m, 12000, MethodParams{}, 3);
            CHECK(r.total_evals() == 12000);
            CHECK(p.evaluations() - before == 12000);
            CHECK(r.evals_sampling + r.evals_active + r.evals_leaf_integration == r.total_evals());
        }
    }
}

TEST_CASE("failed runs are recorded, not thrown") {
    MethodParams p;
    p.leaf_rule = LeafRule::midpoint;
    const RunRecord r = run_single("camel", 2, 0, 0, Method::tq_s, 1, p, 1);
    CHECK_FALSE(r.ok);
    CHECK(r.error.find("budget-exhausted") == 0);
    CHECK(std::isnan(r.estimate));
}

TEST_CASE("grid runs are deterministic and independent of jobs") {
    ExperimentConfig c;
    c.dims = {1, 2};
    c.methods = {Method::smc, Method::vegas, Method::tq_s};
    c.replicates = 3;
    c.budget = 2000;
    auto csv = [](const std::vector<RunRecord>& records) {
        std::vector<RunRecord> copy = records;
        for (auto& r : copy) r.wall_time_s = 0.0;
        std::ostringstream out;
        write_runs_csv(out, copy);
        return out.str();
    };
    const std::string serial = csv(run_grid(c));
    c.jobs = 4;
    CHECK(csv(run_grid(c)) == serial);
}

TEST_CASE("runs csv round trip") {
    ExperimentConfig c;
    c.methods = {Method::is, Method::tq_a};
    c.replicates = 2;
    c.budget = 1500;
    const auto records = run_grid(c);
    std::ostringstream out;
    write_runs_csv(out, records);
    std::istringstream in(out.str());
    const auto back = read_runs_csv(in);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].estimate == records[i].estimate);
        CHECK(back[i].seed == records[i].seed);
        CHECK(back[i].method == records[i].method);
        CHECK(back[i].evals_total == records[i].evals_total);
    }
    std::istringstream bad("nope\n");
    CHECK(error_code([&] { read_runs_csv(bad); }) == Errc::invalid_input);
}

TEST_CASE("summary statistics per cell") {
    const std::vector<RunRecord> records{record(Method::smc, 1, -1.0), record(Method::smc, 1, 0.0),
                                         record(Method::smc, 1, 1.0),  record(Method::tq_s, 1, 2.0),
                                         record(Method::tq_s, 1, 2.0), record(Method::vegas, 1, 0.0, false)};
    const auto rows = summarize(records);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].method == Method::smc);
    CHECK(rows[0].median == 0.0);
    CHECK(rows[0].stdev == 1.0);
    CHECK(rows[1].method == Method::vegas);
    CHECK(rows[1].ok == 0);
    CHECK(rows[1].failed == 1);
    CHECK(std::isnan(rows[1].median));
    CHECK(rows[2].stdev == 0.0);

    std::ostringstream csv;
    write_summary_csv(csv, rows);
    CHECK(csv.str().find("camel,vegas,1,0,1,nan,nan,empty") != std::string::npos);
    std::ostringstream txt;
    write_summary_text(txt, rows);
    CHECK(txt.str().find("0.00000 +- 1.00000") != std::string::npos);
}

TEST_CASE("figure rows carry signed and absolute quantiles") {
    std::vector<RunRecord> records;
    for (Method m : {Method::smc, Method::is, Method::vegas, Method::tq_s}) {
        for (std::size_t dim : {1u, 5u, 10u}) {
            for (double e : {-4.0, -1.0, 2.0, 3.0}) records.push_back(record(m, dim, e));
        }
    }
    const auto rows = figure_rows(records);
    CHECK(rows.size() == 12);
    CHECK(rows[0].median == 0.5);
    CHECK(rows[0].q25 == -1.75);
    CHECK(rows[0].q75 == 2.25);
    CHECK(rows[0].abs_median == 2.5);
    std::ostringstream csv;
    write_figure_csv(csv, rows);
    CHECK(csv.str().rfind("method,dim,median,q25,q75,abs_median,abs_q25,abs_q75\n", 0) == 0);
    std::ostringstream svg;
    write_figure_svg(svg, rows, "camel <test>");
    CHECK(svg.str().find("camel &lt;test&gt;") != std::string::npos);
    CHECK(svg.str().find("</svg>") != std::string::npos);
}

TEST_CASE("format_real round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125}) CHECK(std::stod(format_real(v)) == v);
    CHECK(format_real(std::nan("")) == "nan");
}
