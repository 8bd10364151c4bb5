#pragma once

#include <cstddef>
#include <vector>

namespace dispersio {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;

    std::size_t size() const { return x.size(); }
};

constexpr int kPanelOrder = 16;

// Composite 16-point Gauss-Legendre on [a, b] with at least min_nodes nodes.
// Panels never straddle a break point; the panel count in each sub-interval
// is proportional to its length (at least one panel each).
QuadRule gauss_legendre_panels(double a, double b, const std::vector<double>& breaks,
                               std::size_t min_nodes);

}  // namespace dispersio
