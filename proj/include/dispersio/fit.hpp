#pragma once

#include <vector>

namespace dispersio {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y = slope*x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Fit of log(y) against log(x); all values must be positive.
LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dispersio
