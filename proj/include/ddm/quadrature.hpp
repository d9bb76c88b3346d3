#pragma once

#include <vector>

namespace ddm {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss–Legendre rule, nodes by Newton iteration on P_n.
GaussRule gauss_legendre(int n);

/// Composite Gauss rule on [lo, hi]: `panels` equal panels of an n-point rule.
template <class F>
double composite_gauss(F&& f, double lo, double hi, int panels, const GaussRule& rule) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + 0.5 * width * rule.nodes[k]);
        total += 0.5 * width * s;
    }
    return total;
}

}  // namespace ddm
