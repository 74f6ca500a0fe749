#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "treequad/error.hpp"
#include "treequad/experiment.hpp"
#include "treequad/stats.hpp"

namespace treequad {

namespace {

constexpr const char* kRunsHeader =
    "problem,method,dim,replicate,seed,status,estimate,true_value,percent_error,"
    "evals_sampling,evals_active,evals_leaf,evals_total,budget,error,wall_time_s";

std::string csv_safe(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_real(const std::string& s) {
    if (s == "nan" || s.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error(Errc::invalid_input, "malformed number '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(Errc::invalid_input, "malformed integer '" + s + "'");
    }
    return v;
}

std::string fixed(double v, int digits) {
    if (std::isnan(v)) return "nan";
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << kRunsHeader << '\n';
    for (const auto& r : records) {
        out << r.problem << ',' << to_string(r.method) << ',' << r.dim << ',' << r.replicate << ','
            << r.seed << ',' << (r.ok ? "ok" : "failed") << ',' << format_real(r.estimate) << ','
            << format_real(r.true_value) << ',' << format_real(r.percent_error) << ','
            << r.evals_sampling << ',' << r.evals_active << ',' << r.evals_leaf << ',' << r.evals_total
            << ',' << r.budget << ',' << csv_safe(r.error) << ',' << format_real(r.wall_time_s) << '\n';
    }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRunsHeader) {
        throw Error(Errc::invalid_input, "runs CSV header not recognised");
    }
    std::vector<RunRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 16) throw Error(Errc::invalid_input, "runs CSV row has wrong field count");
        RunRecord r;
        r.problem = f[0];
        r.method = parse_method(f[1]);
        r.dim = parse_uint(f[2]);
        r.replicate = parse_uint(f[3]);
        r.seed = parse_uint(f[4]);
        r.ok = f[5] == "ok";
        r.estimate = parse_real(f[6]);
        r.true_value = parse_real(f[7]);
        r.percent_error = parse_real(f[8]);
        r.evals_sampling = parse_uint(f[9]);
        r.evals_active = parse_uint(f[10]);
        r.evals_leaf = parse_uint(f[11]);
        r.evals_total = parse_uint(f[12]);
        r.budget = parse_uint(f[13]);
        r.error = f[14];
        r.wall_time_s = parse_real(f[15]);
        records.push_back(std::move(r));
    }
    return records;
}

std::string config_json(const ExperimentConfig& config) {
    nlohmann::ordered_json j;
    j["problem"] = config.problem;
    j["dims"] = config.dims;
    std::vector<std::string> methods;
    for (Method m : config.methods) methods.emplace_back(to_string(m));
    j["methods"] = methods;
    j["budget"] = config.budget;
    j["replicates"] = config.replicates;
    j["root_seed"] = config.root_seed;
    const MethodParams& p = config.params;
    j["sampler"] = to_string(p.sampler);
    j["split"] = to_string(p.split);
    j["stop_max_samples"] = p.stop_max_samples ? nlohmann::ordered_json(*p.stop_max_samples) : nullptr;
    j["stop_variance"] = p.stop_variance ? nlohmann::ordered_json(*p.stop_variance) : nullptr;
    j["depth_cap"] = p.depth_cap;
    j["leaf_integral"] = to_string(p.leaf_rule);
    j["leaf_evals"] = p.leaf_evals;
    j["active_fraction"] = p.active_fraction;
    j["budget_includes_leaf_evals"] = p.budget_includes_leaf_evals;
    j["vegas"] = {{"bins", p.vegas.bins}, {"iterations", p.vegas.iterations}, {"alpha", p.vegas.alpha}};
    j["metropolis"] = {{"step", p.metropolis_step}, {"burn_in_fraction", p.metropolis_burn_in}};
    j["seed_rule"] =
        "root_seed ^ splitmix64(splitmix64(replicate) ^ splitmix64(dim_index + 0x632be59bd9b4e019) ^ "
        "fnv1a(method))";
    return j.dump(2);
}

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    using Key = std::tuple<std::string, Method, std::size_t>;
    std::map<Key, std::pair<std::vector<double>, std::size_t>> cells;
    for (const auto& r : records) {
        auto& cell = cells[{r.problem, r.method, r.dim}];
        if (r.ok && std::isfinite(r.percent_error)) {
            cell.first.push_back(r.percent_error);
        } else {
            ++cell.second;
        }
    }
    std::vector<SummaryRow> rows;
    for (const auto& [key, cell] : cells) {
        SummaryRow row;
        std::tie(row.problem, row.method, row.dim) = key;
        row.ok = cell.first.size();
        row.failed = cell.second;
        if (cell.first.empty()) {
            row.median = row.stdev = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.median = stats::median(cell.first);
            row.stdev = stats::sample_stdev(cell.first);
        }
        rows.push_back(row);
    }
    return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "problem,method,dim,ok,failed,median_percent_error,stdev_percent_error,flag\n";
    for (const auto& r : rows) {
        out << r.problem << ',' << to_string(r.method) << ',' << r.dim << ',' << r.ok << ',' << r.failed
            << ',' << format_real(r.median) << ',' << format_real(r.stdev) << ','
            << (r.ok == 0 ? "empty" : "") << '\n';
    }
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
    std::set<std::size_t> dims;
    std::map<std::pair<std::string, Method>, std::map<std::size_t, const SummaryRow*>> table;
    for (const auto& r : rows) {
        dims.insert(r.dim);
        table[{r.problem, r.method}][r.dim] = &r;
    }
    constexpr int kName = 10;
    constexpr int kCell = 26;
    out << std::left << std::setw(kName) << "problem" << std::setw(kName) << "method";
    for (std::size_t d : dims) out << std::right << std::setw(kCell) << (std::to_string(d) + "D");
    out << '\n';
    for (const auto& [key, by_dim] : table) {
        out << std::left << std::setw(kName) << key.first << std::setw(kName) << to_string(key.second);
        for (std::size_t d : dims) {
            std::string cell = "-";
            if (auto it = by_dim.find(d); it != by_dim.end() && it->second->ok > 0) {
                cell = fixed(it->second->median, 5) + " +- " + fixed(it->second->stdev, 5);
            }
            out << std::right << std::setw(kCell) << cell;
        }
        out << '\n';
    }
}

std::vector<FigureRow> figure_rows(const std::vector<RunRecord>& records) {
    std::map<std::pair<Method, std::size_t>, std::vector<double>> cells;
    for (const auto& r : records) {
        if (r.ok && std::isfinite(r.percent_error)) cells[{r.method, r.dim}].push_back(r.percent_error);
    }
    std::vector<FigureRow> rows;
    for (const auto& [key, errors] : cells) {
        std::vector<double> abs_errors(errors.size());
        std::transform(errors.begin(), errors.end(), abs_errors.begin(), [](double e) { return std::abs(e); });
        rows.push_back({key.first, key.second, stats::quantile(errors, 0.5), stats::quantile(errors, 0.25),
                        stats::quantile(errors, 0.75), stats::quantile(abs_errors, 0.5),
                        stats::quantile(abs_errors, 0.25), stats::quantile(abs_errors, 0.75)});
    }
    return rows;
}

void write_figure_csv(std::ostream& out, const std::vector<FigureRow>& rows) {
    out << "method,dim,median,q25,q75,abs_median,abs_q25,abs_q75\n";
    for (const auto& r : rows) {
        out << to_string(r.method) << ',' << r.dim << ',' << format_real(r.median) << ','
            << format_real(r.q25) << ',' << format_real(r.q75) << ',' << format_real(r.abs_median) << ','
            << format_real(r.abs_q25) << ',' << format_real(r.abs_q75) << '\n';
    }
}

void write_figure_svg(std::ostream& out, const std::vector<FigureRow>& rows, std::string_view title) {
    constexpr double kWidth = 960;
    constexpr double kHeight = 420;
    constexpr double kPanel = 400;
    constexpr double kLeft = 70;
    constexpr double kTop = 50;
    constexpr double kPlotW = kPanel - 90;
    constexpr double kPlotH = kHeight - 120;
    constexpr double kAbsFloor = 1e-6;
    static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};

    std::set<std::size_t> dim_set;
    std::set<Method> method_set;
    double lo = 0.0;
    double hi = 0.0;
    double log_lo = std::log10(kAbsFloor);
    double log_hi = 2.0;
    for (const auto& r : rows) {
        dim_set.insert(r.dim);
        method_set.insert(r.method);
        lo = std::min({lo, r.q25, r.median});
        hi = std::max({hi, r.q75, r.median});
        log_hi = std::max(log_hi, std::log10(std::max(r.abs_q75, kAbsFloor)));
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const std::vector<std::size_t> dims(dim_set.begin(), dim_set.end());
    auto x_of = [&](double panel_x, std::size_t dim) {
        const auto idx = static_cast<double>(std::lower_bound(dims.begin(), dims.end(), dim) - dims.begin());
        const double span = dims.size() > 1 ? static_cast<double>(dims.size() - 1) : 1.0;
        return panel_x + kLeft + kPlotW * (dims.size() > 1 ? idx / span : 0.5);
    };
    auto y_lin = [&](double v) { return kTop + kPlotH * (1.0 - (v - lo) / (hi - lo)); };
    auto y_log = [&](double v) {
        const double l = std::log10(std::max(v, kAbsFloor));
        return kTop + kPlotH * (1.0 - (l - log_lo) / (log_hi - log_lo));
    };

    out << std::fixed << std::setprecision(2);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"16\">" << xml_escape(title) << "</text>\n";

    for (int panel = 0; panel < 2; ++panel) {
        const double px = panel * kPanel;
        out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
        out << "<rect x=\"" << px + kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlotW << "\" height=\""
            << kPlotH << "\" fill=\"none\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px + kLeft + kPlotW / 2 << "\" y=\"" << kTop - 8
            << "\" text-anchor=\"middle\">"
            << (panel == 0 ? "percentage error (median, IQR)" : "|percentage error| (log10)") << "</text>\n";
        for (std::size_t d : dims) {
            out << "<text x=\"" << x_of(px, d) << "\" y=\"" << kTop + kPlotH + 16
                << "\" text-anchor=\"middle\">" << d << "</text>\n";
        }
        out << "<text x=\"" << px + kLeft + kPlotW / 2 << "\" y=\"" << kTop + kPlotH + 34
            << "\" text-anchor=\"middle\">dimension</text>\n";
        const double axis_lo = panel == 0 ? lo : log_lo;
        const double axis_hi = panel == 0 ? hi : log_hi;
        for (int t = 0; t <= 4; ++t) {
            const double v = axis_lo + (axis_hi - axis_lo) * t / 4.0;
            const double y = kTop + kPlotH * (1.0 - t / 4.0);
            out << "<text x=\"" << px + kLeft - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
                << fixed(v, panel == 0 ? 1 : 1) << "</text>\n";
        }

        std::size_t color = 0;
        for (Method m : method_set) {
            const char* stroke = kColors[color++ % std::size(kColors)];
            std::vector<const FigureRow*> series;
            for (const auto& r : rows) {
                if (r.method == m) series.push_back(&r);
            }
            std::ostringstream band;
            band << std::fixed << std::setprecision(2);
            std::ostringstream line;
            line << std::fixed << std::setprecision(2);
            for (const auto* r : series) {
                const double y = panel == 0 ? y_lin(r->median) : y_log(r->abs_median);
                line << x_of(px, r->dim) << ',' << y << ' ';
                band << x_of(px, r->dim) << ',' << (panel == 0 ? y_lin(r->q75) : y_log(r->abs_q75)) << ' ';
            }
            for (auto it = series.rbegin(); it != series.rend(); ++it) {
                const auto* r = *it;
                band << x_of(px, r->dim) << ',' << (panel == 0 ? y_lin(r->q25) : y_log(r->abs_q25)) << ' ';
            }
            out << "<polygon points=\"" << band.str() << "\" fill=\"" << stroke
                << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
            out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << stroke
                << "\" stroke-width=\"2\"/>\n";
            if (panel == 1) {
                const double ly = kTop + 14.0 * static_cast<double>(color);
                out << "<text x=\"" << kWidth - 140 << "\" y=\"" << ly << "\" fill=\"" << stroke << "\">"
                    << xml_escape(to_string(m)) << "</text>\n";
            }
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

void write_grid_outputs(const std::filesystem::path& dir, const ExperimentConfig& config,
                        const std::vector<RunRecord>& records) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "runs.csv");
        write_runs_csv(f, records);
    }
    {
        std::ofstream f(dir / "config.json");
        f << config_json(config) << '\n';
    }
    const auto rows = summarize(records);
    {
        std::ofstream f(dir / "summary.csv");
        write_summary_csv(f, rows);
    }
    {
        std::ofstream f(dir / "summary.txt");
        write_summary_text(f, rows);
    }
}

}  // namespace treequad
