// Ordinary least squares on (log x, log y): scaling-law exponent with its
// standard error.

#pragma once

#include <span>

namespace spinflip::slope {

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    int points_used = 0;
};

/// Fits log y = intercept + slope log x over the points with from <= x <= to.
/// Requires at least 3 points in range with positive x and y; throws
/// std::invalid_argument otherwise.
SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          double from, double to);

} // namespace spinflip::slope
