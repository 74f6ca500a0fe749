#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "treequad/diagnostics.hpp"
#include "treequad/error.hpp"
#include "treequad/experiment.hpp"

namespace py = pybind11;
using namespace treequad;

namespace {

py::array_t<double> to_array(const PointSet& p) {
    py::array_t<double> out({p.size(), p.dim()});
    std::copy(p.coords().begin(), p.coords().end(), out.mutable_data());
    return out;
}

PointSet from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) throw Error(Errc::invalid_input, "expected an N x D array of points");
    const auto n = static_cast<std::size_t>(a.shape(0));
    const auto d = static_cast<std::size_t>(a.shape(1));
    return PointSet(d, std::vector<double>(a.data(), a.data() + n * d));
}

Function wrap(py::function f) {
    return [f = std::move(f)](std::span<const double> x) {
        py::gil_scoped_acquire gil;
        py::array_t<double> arr(x.size());
        std::copy(x.begin(), x.end(), arr.mutable_data());
        return f(arr).cast<double>();
    };
}

template <class E>
void bind_enum_names(py::enum_<E>& e) {
    e.def("__str__", [](E v) { return std::string(to_string(v)); });
}

}  // namespace

PYBIND11_MODULE(_treequad, m) {
    m.doc() = "Tree quadrature core";

    static PyObject* error_type = PyErr_NewException("treequad.TreequadError", PyExc_ValueError, nullptr);
    m.add_object("TreequadError", py::handle(error_type));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string code(to_string(e.code()));
            py::object exc = py::handle(error_type)(code + ": " + e.what());
            exc.attr("code") = code;
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<Box>(m, "Box")
        .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("lower"), py::arg("upper"))
        .def_static("cube", &Box::cube, py::arg("dim"), py::arg("lo"), py::arg("hi"))
        .def_property_readonly("lower", py::overload_cast<>(&Box::lower, py::const_))
        .def_property_readonly("upper", py::overload_cast<>(&Box::upper, py::const_))
        .def_property_readonly("dim", &Box::dim)
        .def("volume", &Box::volume)
        .def("center", &Box::center)
        .def("contains", [](const Box& b, const std::vector<double>& x) { return b.contains(x); })
        .def("__repr__", [](const Box& b) {
            std::ostringstream s;
            s << "Box(dim=" << b.dim() << ", volume=" << format_real(b.volume()) << ")";
            return s.str();
        });

    py::class_<Problem>(m, "Problem")
        .def(py::init([](std::string name, Box domain, py::function component, py::function prior,
                         double true_value) {
                 return Problem(std::move(name), std::move(domain), wrap(std::move(component)),
                                wrap(std::move(prior)), true_value);
             }),
             py::arg("name"), py::arg("domain"), py::arg("component"), py::arg("prior"), py::arg("true_value"))
        .def_property_readonly("name", &Problem::name)
        .def_property_readonly("dim", &Problem::dim)
        .def_property_readonly("domain", &Problem::domain)
        .def_property_readonly("true_value", &Problem::true_value)
        .def_property_readonly("evaluations", &Problem::evaluations)
        .def("reset_evaluations", &Problem::reset_evaluations)
        .def("__call__", [](const Problem& p, const std::vector<double>& x) { return p.integrand(x); });

    m.def("make_problem", &make_problem, py::arg("id"), py::arg("dim"));
    m.def("make_constant", &make_constant, py::arg("domain"), py::arg("value"));
    m.def("problem_ids", &problem_ids);

    py::class_<SampleBatch>(m, "SampleBatch")
        .def_property_readonly("locations", [](const SampleBatch& b) { return to_array(b.locations); })
        .def_readonly("values", &SampleBatch::values)
        .def_readonly("proposals", &SampleBatch::proposals)
        .def_readonly("acceptance_rate", &SampleBatch::acceptance_rate)
        .def_readonly("warnings", &SampleBatch::warnings)
        .def("__len__", &SampleBatch::size);

    m.def("sample_uniform", &sample_uniform, py::arg("problem"), py::arg("n"), py::arg("seed"));
    m.def("sample_mixture", &sample_mixture_direct, py::arg("problem"), py::arg("n"), py::arg("seed"));
    m.def("sample_metropolis", &sample_metropolis, py::arg("problem"), py::arg("n"), py::arg("seed"),
          py::arg("step") = 0.05, py::arg("burn_in") = 0);

    py::enum_<SplitRule> split(m, "SplitRule");
    split.value("min_sse", SplitRule::min_sse).value("kd", SplitRule::kd).value("random", SplitRule::random);
    bind_enum_names(split);
    py::enum_<LeafRule> leaf(m, "LeafRule");
    leaf.value("random", LeafRule::random)
        .value("midpoint", LeafRule::midpoint)
        .value("mean", LeafRule::mean)
        .value("median", LeafRule::median);
    bind_enum_names(leaf);
    py::enum_<SamplerKind> sampler(m, "SamplerKind");
    sampler.value("uniform", SamplerKind::uniform)
        .value("mixture", SamplerKind::mixture)
        .value("metropolis", SamplerKind::metropolis);
    bind_enum_names(sampler);
    py::enum_<Method> method(m, "Method");
    method.value("smc", Method::smc)
        .value("is_", Method::is)
        .value("vegas", Method::vegas)
        .value("tq_s", Method::tq_s)
        .value("tq_a", Method::tq_a);
    bind_enum_names(method);
    m.def("parse_method", &parse_method);
    py::enum_<LeafOrder> order(m, "LeafOrder");
    order.value("volume", LeafOrder::volume).value("contribution", LeafOrder::contribution);
    bind_enum_names(order);

    py::class_<StoppingCondition>(m, "StoppingCondition")
        .def(py::init<>())
        .def_static("samples", &StoppingCondition::samples)
        .def_static("variance", &StoppingCondition::variance)
        .def_readwrite("max_samples", &StoppingCondition::max_samples)
        .def_readwrite("max_variance", &StoppingCondition::max_variance)
        .def_readwrite("depth_cap", &StoppingCondition::depth_cap);

    py::class_<Container>(m, "Leaf")
        .def_readonly("bounds", &Container::bounds)
        .def_readonly("id", &Container::id)
        .def_readonly("depth", &Container::depth)
        .def_readonly("Y", &Container::Y)
        .def_property_readonly("X", [](const Container& c) { return to_array(c.X); });

    py::class_<Tree>(m, "Tree")
        .def_readonly("domain", &Tree::domain)
        .def_readonly("leaves", &Tree::leaves)
        .def_readonly("total_samples", &Tree::total_samples)
        .def_readonly("active_evals", &Tree::active_evals)
        .def_readonly("warnings", &Tree::warnings)
        .def("split_count", &Tree::split_count);

    m.def("build_tq_s", &build_tq_s, py::arg("batch"), py::arg("problem"), py::arg("rule") = SplitRule::min_sse,
          py::arg("stop") = StoppingCondition::samples(1), py::arg("seed") = 0);
    m.def("build_tq_a", &build_tq_a, py::arg("batch"), py::arg("problem"), py::arg("rule") = SplitRule::min_sse,
          py::arg("stop") = StoppingCondition::samples(1), py::arg("budget") = 0, py::arg("seed") = 0);
    m.def(
        "integrate_tree",
        [](const Tree& t, const Problem& p, LeafRule rule, std::size_t evals_per_leaf, std::uint64_t seed) {
            LeafIntegration opts;
            opts.rule = rule;
            opts.evals_per_leaf = evals_per_leaf;
            return integrate_tree(t, p, opts, seed);
        },
        py::arg("tree"), py::arg("problem"), py::arg("rule") = LeafRule::random,
        py::arg("evals_per_leaf") = kDefaultLeafEvals, py::arg("seed") = 0);

    py::class_<LeafContribution>(m, "LeafContribution")
        .def_readonly("leaf_id", &LeafContribution::leaf_id)
        .def_readonly("bounds", &LeafContribution::bounds)
        .def_readonly("contribution", &LeafContribution::contribution)
        .def_readonly("samples", &LeafContribution::samples);

    py::class_<IntegralResult>(m, "IntegralResult")
        .def(py::init<>())
        .def_readonly("value", &IntegralResult::value)
        .def_readonly("contributions", &IntegralResult::contributions)
        .def_readonly("evals_sampling", &IntegralResult::evals_sampling)
        .def_readonly("evals_active", &IntegralResult::evals_active)
        .def_readonly("evals_leaf_integration", &IntegralResult::evals_leaf_integration)
        .def_readonly("method", &IntegralResult::method)
        .def_readonly("seed", &IntegralResult::seed)
        .def_readonly("std_error", &IntegralResult::std_error)
        .def_readonly("warnings", &IntegralResult::warnings)
        .def_property_readonly("total_evals", &IntegralResult::total_evals);

    py::class_<VegasOptions>(m, "VegasOptions")
        .def(py::init<>())
        .def_readwrite("iterations", &VegasOptions::iterations)
        .def_readwrite("bins", &VegasOptions::bins)
        .def_readwrite("alpha", &VegasOptions::alpha);

    m.def("smc", &smc, py::arg("problem"), py::arg("n"), py::arg("seed"));
    m.def(
        "importance_sampling",
        [](const Problem& p, const std::string& proposal, std::size_t n, std::uint64_t seed) {
            if (proposal != "prior" && proposal != "mixture") {
                throw Error(Errc::invalid_argument, "proposal must be 'prior' or 'mixture'");
            }
            const Proposal g = proposal == "prior" ? prior_proposal(p) : mixture_proposal(p);
            return importance_sampling(p, g, n, seed).result;
        },
        py::arg("problem"), py::arg("proposal"), py::arg("n"), py::arg("seed"));
    m.def(
        "vegas",
        [](const Problem& p, std::size_t n, const VegasOptions& o, std::uint64_t seed) {
            return vegas(p, n, o, seed).result;
        },
        py::arg("problem"), py::arg("n"), py::arg("options") = VegasOptions{}, py::arg("seed") = 0);

    py::class_<MethodParams>(m, "MethodParams")
        .def(py::init<>())
        .def_readwrite("sampler", &MethodParams::sampler)
        .def_readwrite("split", &MethodParams::split)
        .def_readwrite("stop_max_samples", &MethodParams::stop_max_samples)
        .def_readwrite("stop_variance", &MethodParams::stop_variance)
        .def_readwrite("depth_cap", &MethodParams::depth_cap)
        .def_readwrite("leaf_rule", &MethodParams::leaf_rule)
        .def_readwrite("leaf_evals", &MethodParams::leaf_evals)
        .def_readwrite("active_fraction", &MethodParams::active_fraction)
        .def_readwrite("budget_includes_leaf_evals", &MethodParams::budget_includes_leaf_evals)
        .def_readwrite("vegas", &MethodParams::vegas)
        .def_readwrite("metropolis_step", &MethodParams::metropolis_step)
        .def_readwrite("metropolis_burn_in", &MethodParams::metropolis_burn_in);

    py::class_<TreeRun>(m, "TreeRun")
        .def_readonly("batch", &TreeRun::batch)
        .def_readonly("tree", &TreeRun::tree)
        .def_readonly("result", &TreeRun::result);

    m.def("run_method", &run_method, py::arg("problem"), py::arg("method"), py::arg("budget"),
          py::arg("params") = MethodParams{}, py::arg("seed") = 0);
    m.def("run_tree_method", &run_tree_method, py::arg("problem"), py::arg("method"), py::arg("budget"),
          py::arg("params") = MethodParams{}, py::arg("seed") = 0);
    m.def("replicate_seed", &replicate_seed, py::arg("root_seed"), py::arg("replicate"), py::arg("dim_index"),
          py::arg("method"));

    py::class_<RemovalPoint>(m, "RemovalPoint")
        .def_readonly("removed", &RemovalPoint::removed)
        .def_readonly("estimate", &RemovalPoint::estimate)
        .def_readonly("retained_fraction", &RemovalPoint::retained_fraction);
    py::class_<CumulativePoint>(m, "CumulativePoint")
        .def_readonly("included", &CumulativePoint::included)
        .def_readonly("cumulative", &CumulativePoint::cumulative);

    m.def(
        "removal_curve",
        [](const IntegralResult& r, const py::array_t<double, py::array::c_style | py::array::forcecast>& posterior,
           LeafOrder order) { return removal_curve(r, from_array(posterior), order).points; },
        py::arg("result"), py::arg("posterior"), py::arg("order") = LeafOrder::volume);
    m.def(
        "cumulative_curve",
        [](const IntegralResult& r, LeafOrder order) { return cumulative_curve(r, order).points; },
        py::arg("result"), py::arg("order") = LeafOrder::volume);
    m.def(
        "surrogate_sample",
        [](const IntegralResult& r, std::size_t n, std::uint64_t seed) {
            Rng rng(seed);
            const SurrogateSample s = surrogate_sample(r, n, rng);
            return py::make_tuple(to_array(s.locations), s.leaf_ids);
        },
        py::arg("result"), py::arg("n"), py::arg("seed") = 0);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("problem", &ExperimentConfig::problem)
        .def_readwrite("dims", &ExperimentConfig::dims)
        .def_readwrite("methods", &ExperimentConfig::methods)
        .def_readwrite("budget", &ExperimentConfig::budget)
        .def_readwrite("replicates", &ExperimentConfig::replicates)
        .def_readwrite("root_seed", &ExperimentConfig::root_seed)
        .def_readwrite("params", &ExperimentConfig::params)
        .def_readwrite("jobs", &ExperimentConfig::jobs)
        .def("validate", &ExperimentConfig::validate);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("problem", &RunRecord::problem)
        .def_readonly("method", &RunRecord::method)
        .def_readonly("dim", &RunRecord::dim)
        .def_readonly("replicate", &RunRecord::replicate)
        .def_readonly("seed", &RunRecord::seed)
        .def_readonly("ok", &RunRecord::ok)
        .def_readonly("error", &RunRecord::error)
        .def_readonly("estimate", &RunRecord::estimate)
        .def_readonly("true_value", &RunRecord::true_value)
        .def_readonly("percent_error", &RunRecord::percent_error)
        .def_readonly("evals_total", &RunRecord::evals_total)
        .def_readonly("wall_time_s", &RunRecord::wall_time_s);

    py::class_<SummaryRow>(m, "SummaryRow")
        .def_readonly("problem", &SummaryRow::problem)
        .def_readonly("method", &SummaryRow::method)
        .def_readonly("dim", &SummaryRow::dim)
        .def_readonly("ok", &SummaryRow::ok)
        .def_readonly("failed", &SummaryRow::failed)
        .def_readonly("median", &SummaryRow::median)
        .def_readonly("stdev", &SummaryRow::stdev);

    m.def(
        "run_grid",
        [](const ExperimentConfig& c) {
            py::gil_scoped_release release;
            return run_grid(c);
        },
        py::arg("config"));
    m.def("summarize", &summarize, py::arg("records"));
    m.def("write_grid_outputs", &write_grid_outputs, py::arg("dir"), py::arg("config"), py::arg("records"));
    m.def(
        "write_figure",
        [](const std::vector<RunRecord>& records, const std::string& title) {
            const auto rows = figure_rows(records);
            std::ostringstream csv;
            std::ostringstream svg;
            write_figure_csv(csv, rows);
            write_figure_svg(svg, rows, title);
            return py::make_tuple(csv.str(), svg.str());
        },
        py::arg("records"), py::arg("title") = "");
}
