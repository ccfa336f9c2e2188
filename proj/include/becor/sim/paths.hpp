#pragma once

#include <cstdint>
#include <vector>

#include "becor/errors.hpp"

namespace becor {

enum class SimScheme { ExactZ, Euler, ClaytonEuler };

// Simulated survival-probability paths on a fixed time grid. Values stay
// strictly inside (0,1); boundary touches are clamped and counted.
struct PathSet {
    std::vector<double> times;  // grid, absolute year fractions, strictly increasing
    std::size_t n_paths = 0;
    std::size_t n_names = 0;
    std::uint64_t seed = 0;
    SimScheme scheme = SimScheme::ExactZ;
    long clamp_count = 0;
    std::vector<double> q;  // [path][step][name], flattened

    double at(std::size_t path, std::size_t step, std::size_t name) const {
        return q[(path * times.size() + step) * n_names + name];
    }
    double& at(std::size_t path, std::size_t step, std::size_t name) {
        return q[(path * times.size() + step) * n_names + name];
    }

    double clamp_rate() const {
        const double total = static_cast<double>(n_paths) *
                             static_cast<double>(times.size() ? times.size() - 1 : 0) *
                             static_cast<double>(n_names);
        return total > 0.0 ? clamp_count / total : 0.0;
    }
    bool clamp_warning() const { return clamp_rate() > 0.01; }
};

inline std::vector<double> uniform_grid(double t0, double t_end, int steps) {
    require_domain(steps >= 1 && t_end > t0, "uniform_grid: need t_end > t0, steps >= 1");
    std::vector<double> g(steps + 1);
    for (int m = 0; m <= steps; ++m) g[m] = t0 + (t_end - t0) * m / steps;
    return g;
}

} // namespace becor
