#include "dispersio/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace dispersio {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_line: need at least two paired samples");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    f.n = x.size();
    return f;
}

LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::invalid_argument("fit_loglog: values must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly);
}

}  // namespace dispersio
