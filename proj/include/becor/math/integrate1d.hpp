#pragma once

// Plain 1-d integration helpers for deterministic time integrals
// (Merton psi/beta transforms) and cumulative chi fallbacks.

#include <cmath>
#include <functional>
#include <vector>

#include "becor/errors.hpp"

namespace becor {

// Composite Simpson on [a,b] with n panels (n rounded up to even).
inline double integrate_simpson(const std::function<double(double)>& f,
                                double a, double b, int n = 512) {
    if (a == b) return 0.0;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Cumulative trapezoid of f over an increasing grid; out[k] = int_{x0}^{xk} f.
inline std::vector<double> cumulative_trapezoid(const std::function<double(double)>& f,
                                                const std::vector<double>& grid) {
    require_domain(grid.size() >= 2, "cumulative_trapezoid: need at least two points");
    std::vector<double> out(grid.size(), 0.0);
    double prev = f(grid[0]);
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double cur = f(grid[k]);
        out[k] = out[k - 1] + 0.5 * (prev + cur) * (grid[k] - grid[k - 1]);
        prev = cur;
    }
    return out;
}

inline std::vector<double> linspace(double a, double b, int n) {
    require_domain(n >= 2, "linspace: need at least two points");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

} // namespace becor
