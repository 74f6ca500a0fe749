#include "treequad/problems.hpp"

#include <cmath>
#include <numbers>

#include "treequad/error.hpp"

namespace treequad {

namespace {

void require_dim(std::size_t dim) {
    if (dim == 0) throw Error(Errc::invalid_dimension, "dimension must be at least 1");
}

void validate(const GaussianMixtureSpec& spec, const Box& domain) {
    if (!(spec.variance > 0.0) || !std::isfinite(spec.variance)) {
        throw Error(Errc::invalid_argument, "mixture variance must be positive");
    }
    if (spec.means.empty()) throw Error(Errc::invalid_argument, "mixture has no modes");
    for (const auto& m : spec.means) {
        if (m.size() != domain.dim()) {
            throw Error(Errc::invalid_dimension, "mixture mean dimension mismatch");
        }
        if (!domain.contains(m)) {
            throw Error(Errc::invalid_argument, "mixture mean outside the domain");
        }
    }
}

Problem make_mixture_problem(std::string name, Box domain, GaussianMixtureSpec spec) {
    validate(spec, domain);
    const double truth = mixture_true_value(spec, domain);
    Function f = [spec](std::span<const double> x) { return spec.density(x); };
    Function p = uniform_prior(domain);
    return Problem(std::move(name), std::move(domain), std::move(f), std::move(p), truth,
                   std::move(spec));
}

}  // namespace

double GaussianMixtureSpec::density(std::span<const double> x) const {
    const double dim = static_cast<double>(x.size());
    const double norm = std::pow(2.0 * std::numbers::pi * variance, -0.5 * dim);
    double total = 0.0;
    for (const auto& mu : means) {
        double r2 = 0.0;
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double dx = x[d] - mu[d];
            r2 += dx * dx;
        }
        total += std::exp(-0.5 * r2 / variance);
    }
    return norm * total;
}

Problem::Problem(std::string name, Box domain, Function component, Function prior,
                 double true_value, std::optional<GaussianMixtureSpec> mixture)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      component_(std::move(component)),
      prior_(std::move(prior)),
      true_value_(true_value),
      mixture_(std::move(mixture)),
      counter_(std::make_shared<std::atomic<std::uint64_t>>(0)) {
    if (!component_ || !prior_) {
        throw Error(Errc::invalid_argument, "problem needs both f and p");
    }
}

double Problem::integrand(std::span<const double> x) const {
    counter_->fetch_add(1, std::memory_order_relaxed);
    return component_(x) * prior_(x);
}

Function uniform_prior(const Box& domain) {
    const double density = 1.0 / domain.volume();
    return [domain, density](std::span<const double> x) {
        return domain.contains(x) ? density : 0.0;
    };
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double mode_mass(std::span<const double> mean, double variance, const Box& box) {
    const double sigma = std::sqrt(variance);
    double mass = 1.0;
    for (std::size_t d = 0; d < box.dim(); ++d) {
        const double a = (box.lower(d) - mean[d]) / sigma;
        const double b = (box.upper(d) - mean[d]) / sigma;
        // Difference of tails on the side away from the mean keeps precision
        // when both limits sit deep in one tail.
        double p = 0.0;
        if (a >= 0.0) {
            p = normal_cdf(-a) - normal_cdf(-b);
        } else if (b <= 0.0) {
            p = normal_cdf(b) - normal_cdf(a);
        } else {
            p = 1.0 - normal_cdf(a) - normal_cdf(-b);
        }
        mass *= p;
    }
    return mass;
}

double mixture_true_value(const GaussianMixtureSpec& spec, const Box& domain) {
    validate(spec, domain);
    double mass = 0.0;
    for (const auto& mu : spec.means) mass += mode_mass(mu, spec.variance, domain);
    return mass / domain.volume();
}

Problem make_gaussian(std::size_t dim) {
    require_dim(dim);
    GaussianMixtureSpec spec{{Point(dim, 0.0)}, kBenchmarkVariance};
    return make_mixture_problem("gaussian", Box::cube(dim, -1.0, 1.0), std::move(spec));
}

Problem make_camel(std::size_t dim) {
    require_dim(dim);
    GaussianMixtureSpec spec{{Point(dim, 1.0 / 3.0), Point(dim, 2.0 / 3.0)}, kBenchmarkVariance};
    return make_mixture_problem("camel", Box::cube(dim, 0.0, 1.0), std::move(spec));
}

Problem make_quad_camel(std::size_t dim) {
    require_dim(dim);
    GaussianMixtureSpec spec{
        {Point(dim, 2.0), Point(dim, 4.0), Point(dim, 6.0), Point(dim, 8.0)}, kBenchmarkVariance};
    return make_mixture_problem("quad", Box::cube(dim, 0.0, 10.0), std::move(spec));
}

Problem make_constant(const Box& domain, double value) {
    const double volume = domain.volume();
    Function f = [value, volume](std::span<const double>) { return value * volume; };
    // Constant h keeps leaf rules exact; p is folded in as 1/volume.
    Function p = [domain, volume](std::span<const double> x) {
        return domain.contains(x) ? 1.0 / volume : 0.0;
    };
    return Problem("constant", domain, std::move(f), std::move(p), value * volume);
}

Problem make_problem(std::string_view id, std::size_t dim) {
    if (id == "gaussian") return make_gaussian(dim);
    if (id == "camel") return make_camel(dim);
    if (id == "quad" || id == "quad-camel" || id == "quad_camel") return make_quad_camel(dim);
    throw Error(Errc::invalid_argument, "unknown problem '" + std::string(id) + "'");
}

std::vector<std::string> problem_ids() { return {"gaussian", "camel", "quad"}; }

}  // namespace treequad
