#pragma once

// Simulation of the replication-consistent survival dynamics
// dQ = sigma_bar xi(t) phi(Phi^{-1}(Q)) dW + mu dt and of the Clayton Q'
// mixture. The exact scheme works in Z = Phi^{-1}(Q) space, where the SDE is
// linear: Z_{t+dt} = e^{s^2 I/2} Z_t + N(0, e^{s^2 I} - 1) with
// I = int_t^{t+dt} xi^2. Sampling the step distribution exactly removes all
// discretization bias from the martingale and hedging tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "becor/core/dynamics.hpp"
#include "becor/core/market.hpp"
#include "becor/errors.hpp"
#include "becor/math/linalg.hpp"
#include "becor/math/normal.hpp"
#include "becor/sim/paths.hpp"
#include "becor/sim/rng.hpp"

namespace becor {

inline constexpr double kQClampLo = 1e-10;
inline constexpr double kQClampHi = 1.0 - 1e-10;

namespace detail {

inline void check_grid(const std::vector<double>& grid, const MarketState& market0,
                       bool need_terminating, const XiFunction& xi) {
    require_domain(grid.size() >= 2, "simulate: grid needs at least two points");
    require_domain(std::fabs(grid.front() - market0.t) < 1e-12,
                   "simulate: grid must start at the market's valuation time");
    for (std::size_t m = 1; m < grid.size(); ++m)
        require_domain(grid[m] > grid[m - 1], "simulate: grid must increase strictly");
    require_domain(grid.back() < market0.maturity,
                   "simulate: grid may not reach maturity, Q degenerates to {0,1}");
    if (need_terminating)
        require_domain(xi.terminating(),
                       "simulate: tabulated xi profiles are non-terminating and are "
                       "rejected for terminal-consistency runs");
    for (std::size_t i = 0; i < market0.size(); ++i)
        require_domain(!market0.defaulted[i], "simulate: defaulted names cannot diffuse");
}

inline double clamp_q(double q, long& clamps) {
    if (q < kQClampLo) { ++clamps; return kQClampLo; }
    if (q > kQClampHi) { ++clamps; return kQClampHi; }
    return q;
}

} // namespace detail

// Exact per-step sampling of Z = Phi^{-1}(Q); increments correlated through
// the factor of Sigma^S. A nonzero mu is folded in with a Q-space Euler
// add-on, so exactness holds for mu = 0 only (documented limitation).
inline PathSet simulate_exact(const DynamicsSpec& spec, const MarketState& market0,
                              const std::vector<double>& grid, std::size_t n_paths,
                              std::uint64_t seed) {
    market0.validate();
    spec.validate();
    detail::check_grid(grid, market0, true, spec.xi);
    const std::size_t n = market0.size();
    require_shape(spec.sigma_bar.size() == n, "simulate_exact: sigma_bar size disagrees");

    const Eigen::MatrixXd factor = psd_factor(spec.spread_corr);
    const std::size_t steps = grid.size() - 1;

    // per-step mean factor and increment stddev, shared across paths
    std::vector<std::vector<double>> mean_f(steps, std::vector<double>(n));
    std::vector<std::vector<double>> sd(steps, std::vector<double>(n));
    for (std::size_t m = 0; m < steps; ++m) {
        const double isq = spec.xi.integral_sq(grid[m], grid[m + 1]);
        for (std::size_t i = 0; i < n; ++i) {
            const double s2 = spec.sigma_bar[i] * spec.sigma_bar[i];
            mean_f[m][i] = std::exp(0.5 * s2 * isq);
            sd[m][i] = std::sqrt(std::expm1(s2 * isq));
        }
    }

    PathSet out;
    out.times = grid;
    out.n_paths = n_paths;
    out.n_names = n;
    out.seed = seed;
    out.scheme = SimScheme::ExactZ;
    out.q.resize(n_paths * grid.size() * n);

    const CounterRng rng(seed);
    Eigen::VectorXd eps(n), g(n);
    std::vector<double> z(n);
    for (std::size_t path = 0; path < n_paths; ++path) {
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = norm_ppf(market0.survival[i]);
            out.at(path, 0, i) = market0.survival[i];
        }
        for (std::size_t m = 0; m < steps; ++m) {
            for (std::size_t i = 0; i < n; ++i) eps(i) = rng.normal(path, m, i);
            g = factor * eps;
            const double dt = grid[m + 1] - grid[m];
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = mean_f[m][i] * z[i] + sd[m][i] * g(i);
                double qv = detail::clamp_q(norm_cdf(z[i]), out.clamp_count);
                if (spec.has_drift()) {
                    qv = detail::clamp_q(qv + spec.mu(i, grid[m], qv) * dt,
                                         out.clamp_count);
                    z[i] = norm_ppf(qv);
                }
                out.at(path, m + 1, i) = qv;
            }
        }
    }
    return out;
}

// Euler-Maruyama directly in Q space; weak order one, clamp counter reported.
inline PathSet simulate_euler(const DynamicsSpec& spec, const MarketState& market0,
                              const std::vector<double>& grid, std::size_t n_paths,
                              std::uint64_t seed) {
    market0.validate();
    spec.validate();
    detail::check_grid(grid, market0, false, spec.xi);
    const std::size_t n = market0.size();
    require_shape(spec.sigma_bar.size() == n, "simulate_euler: sigma_bar size disagrees");

    const Eigen::MatrixXd factor = psd_factor(spec.spread_corr);
    const std::size_t steps = grid.size() - 1;

    PathSet out;
    out.times = grid;
    out.n_paths = n_paths;
    out.n_names = n;
    out.seed = seed;
    out.scheme = SimScheme::Euler;
    out.q.resize(n_paths * grid.size() * n);

    const CounterRng rng(seed);
    Eigen::VectorXd eps(n), g(n);
    std::vector<double> q(n);
    for (std::size_t path = 0; path < n_paths; ++path) {
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = market0.survival[i];
            out.at(path, 0, i) = q[i];
        }
        for (std::size_t m = 0; m < steps; ++m) {
            for (std::size_t i = 0; i < n; ++i) eps(i) = rng.normal(path, m, i);
            g = factor * eps;
            const double dt = grid[m + 1] - grid[m];
            const double sdt = std::sqrt(dt);
            const double xi_t = spec.xi.value(grid[m]);
            for (std::size_t i = 0; i < n; ++i) {
                const double vol =
                    spec.sigma_bar[i] * xi_t * norm_pdf(norm_ppf(q[i]));
                double drift = spec.has_drift() ? spec.mu(i, grid[m], q[i]) : 0.0;
                q[i] = detail::clamp_q(q[i] + vol * sdt * g(i) + drift * dt,
                                       out.clamp_count);
                out.at(path, m + 1, i) = q[i];
            }
        }
    }
    return out;
}

// Clayton Q' dynamics: dQ_i = sigma_i [beta_i(Q) dZ + sqrt(1-beta_i^2) dZ*_i]
// with beta_i(Q) = (1-(1-Q)^theta)^{1/2} and the martingale-consistent volatility
// sigma_i = sigma0 (1-Q)(1-(1-Q)^theta)^{1/2}. Euler only; the mixture has no
// closed-form step distribution.
inline PathSet simulate_clayton(double theta, double sigma0, const MarketState& market0,
                                const std::vector<double>& grid, std::size_t n_paths,
                                std::uint64_t seed) {
    market0.validate();
    require_domain(theta > 0.0, "simulate_clayton: theta must be > 0");
    require_domain(sigma0 > 0.0, "simulate_clayton: sigma0 must be > 0");
    {
        XiFunction dummy = XiFunction::merton(market0.maturity);
        detail::check_grid(grid, market0, false, dummy);
    }
    const std::size_t n = market0.size();
    const std::size_t steps = grid.size() - 1;

    PathSet out;
    out.times = grid;
    out.n_paths = n_paths;
    out.n_names = n;
    out.seed = seed;
    out.scheme = SimScheme::ClaytonEuler;
    out.q.resize(n_paths * grid.size() * n);

    const CounterRng rng(seed);
    std::vector<double> q(n);
    for (std::size_t path = 0; path < n_paths; ++path) {
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = market0.survival[i];
            out.at(path, 0, i) = q[i];
        }
        for (std::size_t m = 0; m < steps; ++m) {
            const double sdt = std::sqrt(grid[m + 1] - grid[m]);
            const double common = rng.normal(path, m, n);  // stream n = common factor
            for (std::size_t i = 0; i < n; ++i) {
                const double beta = std::sqrt(1.0 - std::pow(1.0 - q[i], theta));
                const double sigma = sigma0 * (1.0 - q[i]) * beta;
                const double idio = rng.normal(path, m, i);
                const double dv =
                    beta * common + std::sqrt(1.0 - beta * beta) * idio;
                q[i] = detail::clamp_q(q[i] + sigma * sdt * dv, out.clamp_count);
                out.at(path, m + 1, i) = q[i];
            }
        }
    }
    return out;
}

} // namespace becor
