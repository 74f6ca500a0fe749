#include "treequad/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "treequad/error.hpp"

namespace treequad::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw Error(Errc::empty_input, "mean of empty range");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double median(std::span<const double> v) {
    if (v.empty()) throw Error(Errc::empty_input, "median of empty range");
    std::vector<double> w(v.begin(), v.end());
    const std::size_t n = w.size();
    const std::size_t mid = n / 2;
    std::nth_element(w.begin(), w.begin() + mid, w.end());
    const double hi = w[mid];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(w.begin(), w.begin() + mid);
    return 0.5 * (lo + hi);
}

double population_variance(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double sample_stdev(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    return std::sqrt(sum_squared_error(v) / static_cast<double>(v.size() - 1));
}

double quantile(std::span<const double> v, double q) {
    if (v.empty()) throw Error(Errc::empty_input, "quantile of empty range");
    std::vector<double> w(v.begin(), v.end());
    std::sort(w.begin(), w.end());
    const double h = (static_cast<double>(w.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, w.size() - 1);
    return w[lo] + (h - static_cast<double>(lo)) * (w[hi] - w[lo]);
}

double sum_squared_error(std::span<const double> v) {
    if (v.empty()) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

}  // namespace treequad::stats
