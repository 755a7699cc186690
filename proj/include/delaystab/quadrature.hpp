#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "delaystab/function_spec.hpp"

namespace delaystab {

// Composite 2-point Gauss-Legendre quadrature on panels split at the given
// edges. Nodes are strictly interior, so piecewise-constant integrands with
// one-sided jumps at the edges integrate exactly (and smooth integrands at
// fourth order).
template <typename F>
double integrate_panels(F&& f, double lo, double hi, const std::vector<double>& interior_edges,
                        double max_panel) {
    if (hi <= lo) return 0.0;
    std::vector<double> edges;
    edges.push_back(lo);
    for (double e : interior_edges) {
        if (e > lo && e < hi) edges.push_back(e);
    }
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());

    constexpr double inv_sqrt3 = 0.5773502691896257;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        if (b - a < 1e-15 * std::max(1.0, std::abs(b))) continue;
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
        const double w = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double mid = a + (p + 0.5) * w;
            const double off = 0.5 * w * inv_sqrt3;
            sum += 0.5 * w * (f(mid - off) + f(mid + off));
        }
    }
    return sum;
}

/// Integral of a spec over [lo, hi], split at the spec's own breakpoints.
inline double integrate_spec(const ScalarFunctionSpec& spec, double lo, double hi,
                             double max_panel = 0.05) {
    if (hi <= lo) return 0.0;
    auto edges = breakpoints_in(spec, lo, hi);
    return integrate_panels([&](double t) { return evaluate(spec, t); }, lo, hi, edges,
                            max_panel);
}

}  // namespace delaystab
