#include "dispersio/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dispersio {

namespace {

struct Reference {
    std::vector<double> x, w;  // on [-1, 1], ascending
};

const Reference& reference16() {
    static const Reference ref = [] {
        using G = boost::math::quadrature::gauss<double, kPanelOrder>;
        const auto& ax = G::abscissa();
        const auto& aw = G::weights();
        Reference r;
        for (std::size_t i = ax.size(); i-- > 0;) {
            if (ax[i] != 0.0) {
                r.x.push_back(-ax[i]);
                r.w.push_back(aw[i]);
            }
        }
        for (std::size_t i = 0; i < ax.size(); ++i) {
            r.x.push_back(ax[i]);
            r.w.push_back(aw[i]);
        }
        return r;
    }();
    return ref;
}

}  // namespace

QuadRule gauss_legendre_panels(double a, double b, const std::vector<double>& breaks,
                               std::size_t min_nodes) {
    if (!(b > a)) {
        throw std::invalid_argument("gauss_legendre_panels: empty interval");
    }
    std::vector<double> cuts{a};
    std::vector<double> inner(breaks);
    std::sort(inner.begin(), inner.end());
    for (double c : inner) {
        if (c > a && c < b && c > cuts.back()) cuts.push_back(c);
    }
    cuts.push_back(b);

    const double len = b - a;
    const double panels_total =
        std::max(1.0, std::ceil(static_cast<double>(min_nodes) / kPanelOrder));
    const Reference& ref = reference16();

    QuadRule rule;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double lo = cuts[s];
        const double hi = cuts[s + 1];
        const double sub = hi - lo;
        std::size_t np = static_cast<std::size_t>(std::ceil(panels_total * sub / len));
        np = std::max<std::size_t>(np, 1);
        const double h = sub / static_cast<double>(np);
        for (std::size_t p = 0; p < np; ++p) {
            const double c = lo + (static_cast<double>(p) + 0.5) * h;
            for (std::size_t i = 0; i < ref.x.size(); ++i) {
                rule.x.push_back(c + 0.5 * h * ref.x[i]);
                rule.w.push_back(0.5 * h * ref.w[i]);
            }
        }
    }
    return rule;
}

}  // namespace dispersio
