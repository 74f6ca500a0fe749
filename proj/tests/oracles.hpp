#pragma once

// Reference computations used by the tests. None of these share code paths
// with the library: they re-enumerate, re-sum and re-integrate naively.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace oracle {

struct Cut {
    std::size_t dim = 0;
    double threshold = 0.0;
    double score = 0.0;
};

inline double sse(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double y : v) mean += y;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double y : v) s += (y - mean) * (y - mean);
    return s;
}

/// Every midpoint between consecutive distinct coordinates on every axis,
/// children rebuilt from scratch in sample order.
inline std::optional<Cut> brute_force_min_sse(const std::vector<std::vector<double>>& xs,
                                              const std::vector<double>& ys, std::size_t dim) {
    std::optional<Cut> best;
    for (std::size_t d = 0; d < dim; ++d) {
        std::vector<double> coords;
        for (const auto& x : xs) coords.push_back(x[d]);
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        for (std::size_t k = 0; k + 1 < coords.size(); ++k) {
            double t = 0.5 * (coords[k] + coords[k + 1]);
            if (!(t > coords[k])) t = coords[k + 1];
            std::vector<double> left;
            std::vector<double> right;
            for (std::size_t i = 0; i < xs.size(); ++i) (xs[i][d] < t ? left : right).push_back(ys[i]);
            const double score = sse(left) + sse(right);
            if (!best || score < best->score) best = Cut{d, t, score};
        }
    }
    return best;
}

/// Composite trapezoid rule with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
    return s * h;
}

/// Midpoint-grid integral over a box with `per_axis` cells per dimension.
inline double grid_integral(const std::function<double(const std::vector<double>&)>& f,
                            const std::vector<double>& lo, const std::vector<double>& hi,
                            std::size_t per_axis) {
    const std::size_t dim = lo.size();
    std::vector<std::size_t> idx(dim, 0);
    std::vector<double> x(dim);
    double cell = 1.0;
    for (std::size_t d = 0; d < dim; ++d) cell *= (hi[d] - lo[d]) / static_cast<double>(per_axis);
    double sum = 0.0;
    while (true) {
        for (std::size_t d = 0; d < dim; ++d) {
            x[d] = lo[d] + (hi[d] - lo[d]) * (static_cast<double>(idx[d]) + 0.5) / static_cast<double>(per_axis);
        }
        sum += f(x);
        std::size_t d = 0;
        while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
        if (d == dim) break;
    }
    return sum * cell;
}

inline double normal_pdf(double x, double mean, double variance) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// Binomial standard deviation of a frequency estimate.
inline double binomial_sd(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

/// Two-sided one-sample Kolmogorov-Smirnov statistic against U(a, b).
inline double ks_uniform(std::vector<double> v, double a, double b) {
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double cdf = (v[i] - a) / (b - a);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace oracle
