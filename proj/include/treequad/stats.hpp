#pragma once

#include <span>

namespace treequad::stats {

double mean(std::span<const double> v);

/// Even-length inputs return the average of the two middle values.
double median(std::span<const double> v);

/// Population variance (divides by N).
double population_variance(std::span<const double> v);

/// Sample standard deviation (divides by N - 1); 0 for fewer than two values.
double sample_stdev(std::span<const double> v);

/// Linear-interpolation quantile between order statistics (R type 7).
double quantile(std::span<const double> v, double q);

/// Sum of squared deviations about the mean, two-pass, in input order.
double sum_squared_error(std::span<const double> v);

}  // namespace treequad::stats
