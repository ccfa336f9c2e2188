#pragma once

#include <cmath>
#include <functional>
#include <string>

namespace becor {

struct RootResult {
    bool found = false;
    double root = 0.0;
    double f_at_root = 0.0;
    double f_lo = 0.0;   // bracket-end values, reported on no-solution
    double f_hi = 0.0;
    int iterations = 0;
    std::string message;
};

// Bracketing solver: secant steps accepted while they stay inside the bracket
// and shrink it, bisection otherwise. Returns a structured no-solution result
// when f has the same sign at both ends.
inline RootResult find_root_bracketed(const std::function<double(double)>& f,
                                      double lo, double hi,
                                      double f_tol, double x_tol,
                                      int max_iter = 200) {
    RootResult r;
    double fa = f(lo), fb = f(hi);
    r.f_lo = fa;
    r.f_hi = fb;
    if (fa == 0.0) { r.found = true; r.root = lo; return r; }
    if (fb == 0.0) { r.found = true; r.root = hi; return r; }
    if ((fa > 0.0) == (fb > 0.0)) {
        r.message = "no sign change over the bracket";
        return r;
    }
    double a = lo, b = hi;
    for (int it = 0; it < max_iter; ++it) {
        r.iterations = it + 1;
        double mid;
        const double denom = fb - fa;
        if (denom != 0.0) {
            mid = b - fb * (b - a) / denom;  // secant
            const double margin = 0.01 * (b - a);
            if (!(mid > a + margin && mid < b - margin)) mid = 0.5 * (a + b);
        } else {
            mid = 0.5 * (a + b);
        }
        const double fm = f(mid);
        if (std::fabs(fm) < f_tol || 0.5 * (b - a) < x_tol) {
            r.found = true;
            r.root = mid;
            r.f_at_root = fm;
            return r;
        }
        if ((fm > 0.0) == (fa > 0.0)) { a = mid; fa = fm; } else { b = mid; fb = fm; }
    }
    r.found = true;
    r.root = 0.5 * (a + b);
    r.f_at_root = f(r.root);
    r.message = "max iterations reached";
    return r;
}

} // namespace becor
