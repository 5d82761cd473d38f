#pragma once

#include <span>
#include <vector>

namespace vaep::stats {

double mean(std::span<const double> v);
/// Even length: mean of the two middle values. Throws on empty input.
double median(std::span<const double> v);
/// Population standard deviation (divides by n).
double population_stddev(std::span<const double> v);
double pearson(std::span<const double> a, std::span<const double> b);
/// Average ranks (1-based) with ties sharing their mean rank.
std::vector<double> ranks(std::span<const double> v);
double spearman(std::span<const double> a, std::span<const double> b);

/// Ordinary least squares fit y = intercept + slope * x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    /// All x equal: slope is 0 and intercept is mean(y).
    bool degenerate = false;

    double operator()(double x) const { return intercept + slope * x; }
};

LinearFit fit_ols(std::span<const double> x, std::span<const double> y);

} // namespace vaep::stats
