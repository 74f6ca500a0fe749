#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treequad/geometry.hpp"

namespace treequad {

using Function = std::function<double(std::span<const double>)>;

/// Unnormalized sum of isotropic normal densities sharing one variance.
struct GaussianMixtureSpec {
    std::vector<Point> means;
    double variance = 0.0;

    /// f(x) = sum_k N(x | mean_k, variance * I)
    double density(std::span<const double> x) const;
};

/// A weighted integral Z = \int_domain f(x) p(x) dx with a known answer.
///
/// The integrand h = f * p is what every integrator sees; each call through
/// `integrand` is tallied on an atomic counter shared by all copies of the
/// problem, so one instance acts as the evaluation ledger for a run.
class Problem {
public:
    Problem(std::string name, Box domain, Function component, Function prior,
            double true_value, std::optional<GaussianMixtureSpec> mixture = std::nullopt);

    const std::string& name() const noexcept { return name_; }
    std::size_t dim() const noexcept { return domain_.dim(); }
    const Box& domain() const noexcept { return domain_; }
    double true_value() const noexcept { return true_value_; }
    const std::optional<GaussianMixtureSpec>& mixture() const noexcept { return mixture_; }

    /// h(x) = f(x) p(x); counted.
    double integrand(std::span<const double> x) const;
    double operator()(std::span<const double> x) const { return integrand(x); }

    /// Not counted.
    double prior_density(std::span<const double> x) const { return prior_(x); }
    double component(std::span<const double> x) const { return component_(x); }

    std::uint64_t evaluations() const noexcept { return counter_->load(std::memory_order_relaxed); }
    void reset_evaluations() const noexcept { counter_->store(0, std::memory_order_relaxed); }

private:
    std::string name_;
    Box domain_;
    Function component_;
    Function prior_;
    double true_value_;
    std::optional<GaussianMixtureSpec> mixture_;
    std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// Density 1/volume inside the box, 0 outside.
Function uniform_prior(const Box& domain);

/// Exact value of \int_domain f(x) p(x) dx for a mixture f and the uniform
/// prior on `domain`; separable per axis through the normal CDF.
double mixture_true_value(const GaussianMixtureSpec& spec, const Box& domain);

/// Mass of one mode inside the box, prod_d [Phi(upper) - Phi(lower)].
double mode_mass(std::span<const double> mean, double variance, const Box& box);

double normal_cdf(double z);

inline constexpr double kBenchmarkVariance = 1.0 / 200.0;

Problem make_gaussian(std::size_t dim);
Problem make_camel(std::size_t dim);
Problem make_quad_camel(std::size_t dim);

/// h == value everywhere on `domain` (f = value * volume, p uniform).
Problem make_constant(const Box& domain, double value);

/// "gaussian", "camel" or "quad".
Problem make_problem(std::string_view id, std::size_t dim);
std::vector<std::string> problem_ids();

}  // namespace treequad
