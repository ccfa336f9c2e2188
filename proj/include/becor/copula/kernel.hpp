#pragma once

// Conditional default/survival probabilities, their Q- and x-derivatives and
// the chi functions, per copula family. chi_i is the cumulative integral of
// d^2 p_{i|x} / dQ^2 against the factor density; the Gaussian and Clayton
// families admit closed forms, the generic Archimedean adapter computes it
// numerically.

#include <cmath>
#include <functional>
#include <vector>

#include "becor/core/copula.hpp"
#include "becor/errors.hpp"
#include "becor/math/integrate1d.hpp"
#include "becor/math/normal.hpp"
#include "becor/math/quadrature.hpp"

namespace becor {

// ---------------------------------------------------------------------------
// One-factor Gaussian: p = Phi(d), d = (Phibar^{-1}(Q) - rho x)/sqrt(1-rho^2).

inline double cond_default_gauss1f(double q, double rho, double x) {
    require_domain(q > 0.0 && q < 1.0, "cond_default_gauss1f: Q must lie in (0,1)");
    require_domain(std::fabs(rho) < 1.0, "cond_default_gauss1f: |rho| must be < 1");
    const double sbar = norm_ppf_bar(q);
    return norm_cdf((sbar - rho * x) / std::sqrt((1.0 - rho) * (1.0 + rho)));
}

inline double dp_dq_gauss1f(double q, double rho, double x) {
    const double sbar = norm_ppf_bar(q);
    const double den = std::sqrt((1.0 - rho) * (1.0 + rho));
    const double d = (sbar - rho * x) / den;
    return -norm_pdf(d) / (norm_pdf(sbar) * den);
}

inline double d2p_dq2_gauss1f(double q, double rho, double x) {
    const double sbar = norm_ppf_bar(q);
    const double om = (1.0 - rho) * (1.0 + rho);
    const double d = (sbar - rho * x) / std::sqrt(om);
    const double ps = norm_pdf(sbar);
    return norm_pdf(d) * rho * (x - rho * sbar) / (ps * ps * om * std::sqrt(om));
}

inline double dp_dx_gauss1f(double q, double rho, double x) {
    const double sbar = norm_ppf_bar(q);
    const double den = std::sqrt((1.0 - rho) * (1.0 + rho));
    return -rho * norm_pdf((sbar - rho * x) / den) / den;
}

// chi(x) = rho phi(x) / phi(Phi^{-1}(Q)) * dp/dQ.
inline double chi_gauss(double q, double rho, double x) {
    require_domain(q > 0.0 && q < 1.0, "chi_gauss: Q must lie in (0,1)");
    require_domain(std::fabs(rho) < 1.0, "chi_gauss: |rho| must be < 1");
    const double sbar = norm_ppf_bar(q);
    return rho * norm_pdf(x) / norm_pdf(sbar) * dp_dq_gauss1f(q, rho, x);
}

// beta = sigma / phi(Phi^{-1}(Q)): the natural volatility scale of the
// Gaussian drift brackets.
inline double vol_beta(double sigma, double q) {
    require_domain(q > 0.0 && q < 1.0, "vol_beta: Q must lie in (0,1)");
    require_domain(sigma >= 0.0, "vol_beta: sigma must be >= 0");
    return sigma / norm_pdf(norm_ppf(q));
}

inline double sigma_from_beta(double beta, double q) {
    require_domain(q > 0.0 && q < 1.0, "sigma_from_beta: Q must lie in (0,1)");
    return beta * norm_pdf(norm_ppf(q));
}

// ---------------------------------------------------------------------------
// p-factor Gaussian: rho x replaced by rho'x, |rho|^2 in the denominator.

inline double cond_default_gauss_pf(double q, const std::vector<double>& rho,
                                    const std::vector<double>& x) {
    require_domain(q > 0.0 && q < 1.0, "cond_default_gauss_pf: Q must lie in (0,1)");
    require_shape(rho.size() == x.size(), "cond_default_gauss_pf: dim(rho) != dim(x)");
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        dot += rho[k] * x[k];
        norm2 += rho[k] * rho[k];
    }
    require_domain(norm2 < 1.0, "cond_default_gauss_pf: Euclidean |rho| must be < 1");
    return norm_cdf((norm_ppf_bar(q) - dot) / std::sqrt(1.0 - norm2));
}

// ---------------------------------------------------------------------------
// Clayton: Gamma(1/theta, 1) factor, p = exp(-x s), s = (1-Q)^{-theta} - 1.

inline double clayton_rate(double q, double theta) {
    return std::pow(1.0 - q, -theta) - 1.0;
}

inline double cond_default_clayton(double q, double theta, double x) {
    require_domain(q > 0.0 && q < 1.0 - 1e-12,
                   "cond_default_clayton: Q must lie in (0, 1-1e-12); the Q -> 1 "
                   "limit sends the conditional rate to 0 and p to 1");
    require_domain(theta > 0.0, "cond_default_clayton: theta must be > 0");
    require_domain(x >= 0.0, "cond_default_clayton: Gamma factor must be >= 0");
    return std::exp(-x * clayton_rate(q, theta));
}

inline double dp_dq_clayton(double q, double theta, double x) {
    return -x * theta * cond_default_clayton(q, theta, x) *
           std::pow(1.0 - q, -theta - 1.0);
}

inline double d2p_dq2_clayton(double q, double theta, double x) {
    const double p = cond_default_clayton(q, theta, x);
    const double xt = x * theta;
    return xt * xt * p * std::pow(1.0 - q, -2.0 * theta - 2.0) -
           xt * (theta + 1.0) * p * std::pow(1.0 - q, -theta - 2.0);
}

inline double dp_dx_clayton(double q, double theta, double x) {
    return -clayton_rate(q, theta) * cond_default_clayton(q, theta, x);
}

inline double gamma_density(double x, double shape) {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return shape > 1.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
}

// chi(x) = dp/dQ * x theta f_X(x) / (1-Q); vanishes at both domain edges.
inline double chi_clayton(double q, double theta, double x) {
    require_domain(theta > 0.0, "chi_clayton: theta must be > 0");
    require_domain(x >= 0.0, "chi_clayton: Gamma factor must be >= 0");
    if (x == 0.0) return 0.0;
    return dp_dq_clayton(q, theta, x) * x * theta * gamma_density(x, 1.0 / theta) /
           (1.0 - q);
}

// ---------------------------------------------------------------------------
// Kernel object: the per-name closures drift evaluation needs, with the
// factor domain and a matching default quadrature rule.

enum class FactorDomain { RealLine, HalfLine };

struct ConditionalKernel {
    std::size_t n = 0;
    FactorDomain domain = FactorDomain::RealLine;
    bool closed_form_chi = true;

    std::function<double(std::size_t, double, double)> p;        // (i, Q, x)
    std::function<double(std::size_t, double, double)> dp_dq;
    std::function<double(std::size_t, double, double)> d2p_dq2;
    std::function<double(std::size_t, double, double)> dp_dx;
    std::function<double(std::size_t, double, double)> chi;
    std::function<double(double)> density;                       // f_X
    std::function<QuadratureRule(int)> make_rule;
};

inline ConditionalKernel make_gauss1f_kernel(const CopulaSpec& copula) {
    require_domain(copula.family == CopulaFamily::Gauss1F,
                   "make_gauss1f_kernel: spec is not Gauss1F");
    copula.validate();
    ConditionalKernel k;
    k.n = copula.names();
    k.domain = FactorDomain::RealLine;
    std::vector<double> rho(k.n);
    for (std::size_t i = 0; i < k.n; ++i)
        rho[i] = copula.loadings(static_cast<Eigen::Index>(i), 0);
    k.p = [rho](std::size_t i, double q, double x) {
        return cond_default_gauss1f(q, rho[i], x);
    };
    k.dp_dq = [rho](std::size_t i, double q, double x) {
        return dp_dq_gauss1f(q, rho[i], x);
    };
    k.d2p_dq2 = [rho](std::size_t i, double q, double x) {
        return d2p_dq2_gauss1f(q, rho[i], x);
    };
    k.dp_dx = [rho](std::size_t i, double q, double x) {
        return dp_dx_gauss1f(q, rho[i], x);
    };
    k.chi = [rho](std::size_t i, double q, double x) {
        return chi_gauss(q, rho[i], x);
    };
    k.density = [](double x) { return norm_pdf(x); };
    k.make_rule = [](int n) { return gauss_hermite(n); };
    return k;
}

inline ConditionalKernel make_clayton_kernel(double theta, std::size_t n) {
    require_domain(theta > 0.0, "make_clayton_kernel: theta must be > 0");
    ConditionalKernel k;
    k.n = n;
    k.domain = FactorDomain::HalfLine;
    k.p = [theta](std::size_t, double q, double x) {
        return cond_default_clayton(q, theta, x);
    };
    k.dp_dq = [theta](std::size_t, double q, double x) {
        return dp_dq_clayton(q, theta, x);
    };
    k.d2p_dq2 = [theta](std::size_t, double q, double x) {
        return d2p_dq2_clayton(q, theta, x);
    };
    k.dp_dx = [theta](std::size_t, double q, double x) {
        return dp_dx_clayton(q, theta, x);
    };
    k.chi = [theta](std::size_t, double q, double x) {
        return chi_clayton(q, theta, x);
    };
    k.density = [theta](double x) { return gamma_density(x, 1.0 / theta); };
    k.make_rule = [theta](int nn) { return gauss_laguerre(nn, 1.0 / theta); };
    return k;
}

// Generic Archimedean adapter, p_{i|x} = exp(-x xi^{-1}(1-Q)), for the
// residual-drift checker. No closed-form chi is assumed: chi comes from
// cumulative quadrature of the finite-difference second derivative.
// xi is the factor's Laplace transform, xi_inv its inverse.
inline ConditionalKernel make_archimedean_kernel(
    std::function<double(double)> xi, std::function<double(double)> xi_inv,
    std::function<double(double)> density, std::size_t n, double x_max = 60.0,
    int chi_grid_points = 4000) {
    for (double u : {0.1, 0.5, 0.9})
        require_domain(std::fabs(xi(xi_inv(u)) - u) < 1e-8,
                       "make_archimedean_kernel: xi and xi_inv are not inverse");
    ConditionalKernel k;
    k.n = n;
    k.domain = FactorDomain::HalfLine;
    k.closed_form_chi = false;
    auto rate = [xi_inv](double q) { return xi_inv(1.0 - q); };
    k.p = [rate](std::size_t, double q, double x) { return std::exp(-x * rate(q)); };
    k.dp_dq = [rate](std::size_t, double q, double x) {
        const double h = 1e-6 * std::min(q, 1.0 - q);
        return (std::exp(-x * rate(q + h)) - std::exp(-x * rate(q - h))) / (2.0 * h);
    };
    k.d2p_dq2 = [rate](std::size_t, double q, double x) {
        const double h = 1e-5 * std::min(q, 1.0 - q);
        return (std::exp(-x * rate(q + h)) - 2.0 * std::exp(-x * rate(q)) +
                std::exp(-x * rate(q - h))) / (h * h);
    };
    k.dp_dx = [rate](std::size_t, double q, double x) {
        const double r = rate(q);
        return -r * std::exp(-x * r);
    };
    auto d2 = k.d2p_dq2;
    auto dens = density;
    k.chi = [d2, dens, x_max, chi_grid_points](std::size_t i, double q, double x) {
        if (x <= 0.0) return 0.0;
        const auto grid = linspace(0.0, std::min(x, x_max), chi_grid_points);
        auto f = [&](double u) { return d2(i, q, u) * dens(u); };
        return cumulative_trapezoid(f, grid).back();
    };
    k.density = density;
    k.make_rule = nullptr;  // no natural fixed rule; callers use grids
    return k;
}

} // namespace becor
