#include "spinflip/slope.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinflip::slope {

SlopeFit fit_loglog_slope(std::span<const double> x, std::span<const double> y,
                          double from, double to) {
    if (x.size() != y.size())
        throw std::invalid_argument("fit_loglog_slope: x and y must have equal length");
    std::vector<double> lx, ly;
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] < from || x[i] > to) continue;
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: points must be strictly positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const int n = int(lx.size());
    if (n < 3)
        throw std::invalid_argument("fit_loglog_slope: need at least 3 points in range, got " +
                                    std::to_string(n));
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) { mx += lx[i]; my += ly[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_loglog_slope: degenerate x range");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ssr += r * r;
    }
    fit.std_error = (n > 2) ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;
    fit.points_used = n;
    return fit;
}

} // namespace spinflip::slope
