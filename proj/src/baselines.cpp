#include "treequad/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "treequad/error.hpp"
#include "treequad/sampling.hpp"

namespace treequad {

namespace {

void require_count(std::size_t n) {
    if (n == 0) throw Error(Errc::invalid_argument, "sample count must be at least 1");
}

constexpr double kVarianceFloor = 1e-300;

}  // namespace

IntegralResult smc(const Problem& problem, std::size_t n, std::uint64_t seed) {
    require_count(n);
    const Box& domain = problem.domain();
    Rng rng(seed);
    Point x(problem.dim());
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        uniform_in(domain, rng, x);
        const double h = problem.integrand(x);
        const double p = problem.prior_density(x);
        const double f = p > 0.0 ? h / p : 0.0;
        sum += f;
        sum2 += f * f;
    }
    const double nd = static_cast<double>(n);
    IntegralResult result;
    result.method = "smc";
    result.seed = seed;
    result.value = sum / nd;
    result.evals_sampling = n;
    if (n > 1) {
        const double var = std::max(0.0, sum2 / nd - result.value * result.value) * nd / (nd - 1.0);
        result.std_error = std::sqrt(var / nd);
    }
    return result;
}

Proposal prior_proposal(const Problem& problem) {
    const Box domain = problem.domain();
    Proposal g;
    g.name = "prior";
    g.sample = [domain](Rng& rng, std::span<double> out) { uniform_in(domain, rng, out); };
    g.density = [problem](std::span<const double> x) { return problem.prior_density(x); };
    return g;
}

Proposal mixture_proposal(const Problem& problem) {
    if (!problem.mixture()) {
        throw Error(Errc::unsupported, "problem '" + problem.name() + "' has no mixture description");
    }
    const GaussianMixtureSpec spec = *problem.mixture();
    const Box domain = problem.domain();
    double mass = 0.0;
    for (const auto& mu : spec.means) mass += mode_mass(mu, spec.variance, domain);
    Proposal g;
    g.name = "mixture";
    g.sample = [spec, domain](Rng& rng, std::span<double> out) {
        draw_truncated_mixture(spec, domain, rng, out);
    };
    g.density = [spec, domain, mass](std::span<const double> x) {
        return domain.contains(x) ? spec.density(x) / mass : 0.0;
    };
    return g;
}

ImportanceSamplingResult importance_sampling(const Problem& problem, const Proposal& proposal,
                                             std::size_t n, std::uint64_t seed) {
    require_count(n);
    Rng rng(seed);
    Point x(problem.dim());
    ImportanceSamplingResult out;
    out.weights.reserve(n);
    double sum = 0.0;
    double sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        proposal.sample(rng, x);
        const double h = problem.integrand(x);
        const double g = proposal.density(x);
        double w = 0.0;
        if (g > 0.0) {
            w = h / g;
        } else if (h != 0.0) {
            throw Error(Errc::invalid_proposal, "proposal density vanishes where the integrand does not");
        }
        out.weights.push_back(w);
        sum += w;
        sum2 += w * w;
    }
    const double nd = static_cast<double>(n);
    IntegralResult& r = out.result;
    r.method = "is";
    r.seed = seed;
    r.value = sum / nd;
    r.evals_sampling = n;
    if (n > 1) {
        const double var = std::max(0.0, sum2 / nd - r.value * r.value) * nd / (nd - 1.0);
        r.std_error = std::sqrt(var / nd);
    }
    out.ess = sum2 > 0.0 ? sum * sum / sum2 : 0.0;
    return out;
}

VegasGrid VegasGrid::uniform(const Box& domain, std::size_t bins) {
    if (bins < 2) throw Error(Errc::invalid_argument, "vegas needs at least two bins per axis");
    VegasGrid grid;
    grid.edges.resize(domain.dim());
    for (std::size_t d = 0; d < domain.dim(); ++d) {
        auto& e = grid.edges[d];
        e.resize(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i) {
            e[i] = domain.lower(d) + domain.width(d) * static_cast<double>(i) / static_cast<double>(bins);
        }
        e[bins] = domain.upper(d);
    }
    return grid;
}

bool VegasGrid::valid(const Box& domain) const {
    if (edges.size() != domain.dim() || edges.empty()) return false;
    const std::size_t m = bins();
    for (std::size_t d = 0; d < edges.size(); ++d) {
        const auto& e = edges[d];
        if (e.size() != m + 1) return false;
        if (e.front() != domain.lower(d) || e.back() != domain.upper(d)) return false;
        for (std::size_t i = 1; i < e.size(); ++i) {
            if (!(e[i] > e[i - 1])) return false;
        }
    }
    return true;
}

void VegasGrid::refine_axis(std::size_t axis, std::span<const double> accumulated, double alpha) {
    auto& e = edges[axis];
    const std::size_t m = e.size() - 1;
    if (accumulated.size() != m) throw Error(Errc::invalid_argument, "vegas accumulator size mismatch");

    std::vector<double> smooth(m);
    smooth[0] = 0.5 * (accumulated[0] + accumulated[1]);
    smooth[m - 1] = 0.5 * (accumulated[m - 2] + accumulated[m - 1]);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        smooth[i] = (accumulated[i - 1] + accumulated[i] + accumulated[i + 1]) / 3.0;
    }
    const double total = std::accumulate(smooth.begin(), smooth.end(), 0.0);
    if (!(total > 0.0) || !std::isfinite(total)) return;

    std::vector<double> cumulative(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double d = smooth[i] / total;
        double r = 0.0;
        if (d >= 1.0) {
            r = 1.0;
        } else if (d > 0.0) {
            r = std::pow((1.0 - d) / -std::log(d), alpha);
        }
        cumulative[i + 1] = cumulative[i] + r;
    }
    const double r_total = cumulative[m];
    if (!(r_total > 0.0)) return;

    std::vector<double> fresh(m + 1);
    fresh[0] = e[0];
    fresh[m] = e[m];
    for (std::size_t k = 1; k < m; ++k) {
        const double target = r_total * static_cast<double>(k) / static_cast<double>(m);
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t j = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
        j = std::clamp<std::size_t>(j, 1, m) - 1;
        while (j + 1 < m && cumulative[j + 1] - cumulative[j] <= 0.0) ++j;
        const double share = cumulative[j + 1] - cumulative[j];
        const double frac = share > 0.0 ? std::clamp((target - cumulative[j]) / share, 0.0, 1.0) : 0.0;
        fresh[k] = e[j] + frac * (e[j + 1] - e[j]);
    }

    // Keep edges strictly increasing when the weight piles into one old bin.
    const double min_width = (e[m] - e[0]) * 1e-12;
    for (std::size_t k = 1; k < m; ++k) fresh[k] = std::max(fresh[k], fresh[k - 1] + min_width);
    for (std::size_t k = m - 1; k >= 1; --k) fresh[k] = std::min(fresh[k], fresh[k + 1] - min_width);
    e = std::move(fresh);
}

VegasResult vegas(const Problem& problem, std::size_t n_total, const VegasOptions& options,
                  std::uint64_t seed) {
    if (options.iterations == 0) throw Error(Errc::invalid_argument, "vegas needs at least one iteration");
    if (n_total < options.iterations) {
        throw Error(Errc::invalid_argument, "vegas needs at least one evaluation per iteration");
    }
    if (!(options.alpha >= 0.0)) throw Error(Errc::invalid_argument, "vegas alpha must be non-negative");

    const Box& domain = problem.domain();
    const std::size_t dims = problem.dim();
    VegasResult out;
    out.grid = VegasGrid::uniform(domain, options.bins);
    const std::size_t m = options.bins;
    const double md = static_cast<double>(m);

    Rng rng(seed);
    Point x(dims);
    std::vector<std::size_t> bin_of(dims);
    std::vector<std::vector<double>> accumulator(dims, std::vector<double>(m));
    std::vector<std::vector<std::size_t>> hits(dims, std::vector<std::size_t>(m));

    for (std::size_t it = 0; it < options.iterations; ++it) {
        const std::size_t n = n_total / options.iterations + (it < n_total % options.iterations ? 1 : 0);
        for (auto& acc : accumulator) std::fill(acc.begin(), acc.end(), 0.0);
        for (auto& h : hits) std::fill(h.begin(), h.end(), 0);
        double sum = 0.0;
        double sum2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double jacobian = 1.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const auto& e = out.grid.edges[d];
                const double pos = uniform01(rng) * md;
                const std::size_t b = std::min(static_cast<std::size_t>(pos), m - 1);
                const double width = e[b + 1] - e[b];
                x[d] = e[b] + width * (pos - static_cast<double>(b));
                jacobian *= md * width;
                bin_of[d] = b;
            }
            const double w = problem.integrand(x) * jacobian;
            sum += w;
            sum2 += w * w;
            for (std::size_t d = 0; d < dims; ++d) {
                accumulator[d][bin_of[d]] += w * w;
                ++hits[d][bin_of[d]];
            }
        }
        out.result.evals_sampling += n;

        const double nd = static_cast<double>(n);
        if (sum2 == 0.0) {
            out.iteration_estimates.push_back(0.0);
            out.iteration_variances.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const double estimate = sum / nd;
        const double spread = std::max(0.0, sum2 / nd - estimate * estimate);
        const double variance = n > 1 ? spread / (nd - 1.0) : spread;
        out.iteration_estimates.push_back(estimate);
        out.iteration_variances.push_back(std::max(variance, kVarianceFloor));
        // Per-bin mean rather than sum: bin occupancy noise would otherwise
        // warp the grid even for a constant integrand. Empty bins take the
        // mean of their nearest occupied neighbours.
        for (std::size_t d = 0; d < dims; ++d) {
            auto& acc = accumulator[d];
            const auto& h = hits[d];
            for (std::size_t b = 0; b < m; ++b) {
                if (h[b] > 0) acc[b] /= static_cast<double>(h[b]);
            }
            std::vector<double> filled = acc;
            for (std::size_t b = 0; b < m; ++b) {
                if (h[b] > 0) continue;
                double s = 0.0;
                int count = 0;
                for (std::size_t l = b; l-- > 0;) {
                    if (h[l] > 0) {
                        s += acc[l];
                        ++count;
                        break;
                    }
                }
                for (std::size_t r = b + 1; r < m; ++r) {
                    if (h[r] > 0) {
                        s += acc[r];
                        ++count;
                        break;
                    }
                }
                filled[b] = count > 0 ? s / count : 0.0;
            }
            out.grid.refine_axis(d, filled, options.alpha);
        }
    }

    // Inverse-variance weighting, normalized by the smallest variance so the
    // floored weights stay finite.
    double min_var = std::numeric_limits<double>::infinity();
    for (double v : out.iteration_variances) min_var = std::min(min_var, v);
    IntegralResult& r = out.result;
    r.method = "vegas";
    r.seed = seed;
    if (std::isinf(min_var)) {
        r.value = 0.0;
        r.std_error = std::numeric_limits<double>::infinity();
        r.warnings.emplace_back("vegas saw only zero integrand values");
        return out;
    }
    double weight_sum = 0.0;
    double weighted = 0.0;
    for (std::size_t k = 0; k < out.iteration_estimates.size(); ++k) {
        const double v = out.iteration_variances[k];
        if (std::isinf(v)) continue;
        const double w = min_var / v;
        weight_sum += w;
        weighted += w * out.iteration_estimates[k];
    }
    r.value = weighted / weight_sum;
    r.std_error = std::sqrt(min_var / weight_sum);
    return out;
}

}  // namespace treequad
