#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace test_helpers {

// Two-sided Kolmogorov-Smirnov statistic of a sample against a reference CDF.
inline double ks_statistic(std::vector<double> xs,
                           const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double t = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / t));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / t - f));
    }
    return d;
}

// Asymptotic KS critical value at level alpha: sqrt(-ln(alpha/2)/2)/sqrt(T).
inline double ks_critical(double alpha, std::size_t count) {
    return std::sqrt(-0.5 * std::log(0.5 * alpha)) /
           std::sqrt(static_cast<double>(count));
}

}  // namespace test_helpers
