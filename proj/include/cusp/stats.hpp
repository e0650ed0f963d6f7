#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cusp::stats {

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double stddev(std::span<const double> xs);
double median(std::span<const double> xs);
/// Linear-interpolation quantile, q in [0,1].
double quantile(std::span<const double> xs, double q);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct MeanEstimate {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t count = 0;
    Interval ci95;
};

/// Normal-approximation 95% confidence interval for the mean.
MeanEstimate estimate_mean(std::span<const double> xs);

/// Kolmogorov-Smirnov distance between the empirical law of xs and U(0,1).
double ks_uniform(std::vector<double> xs);

} // namespace cusp::stats
