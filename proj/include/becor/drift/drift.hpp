#pragma once

// Hedging-error drift of a delta-hedged basket position per unit time.
//
// Three routes, cross-validating each other:
//  - drift_general: the raw pairwise decomposition for any 1-factor kernel,
//    pair bracket 2 s_i s_j rho_ij dp_i/dQ dp_j/dQ f_X - s_i^2 dp_j/dx chi_i
//    - s_j^2 dp_i/dx chi_j, plus the boundary residual eta.
//  - drift_gauss: the Gaussian form with brackets
//    [2 b_i b_j rho_ij - rho_i'rho_j (b_i^2 + b_j^2)] against the
//    phi(d_i) phi(d_j) kernel, one- and p-factor.
//  - drift_fptd: the First-p-th-to-default specialization with A*_ij weights
//    (conditional count restricted to exactly p-1 defaults among the others).

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "becor/copula/kernel.hpp"
#include "becor/core/copula.hpp"
#include "becor/core/market.hpp"
#include "becor/core/payoff.hpp"
#include "becor/errors.hpp"
#include "becor/math/integrate1d.hpp"
#include "becor/pricing/pricer.hpp"

namespace becor {

struct BreakevenResult {
    bool found = false;
    double rho2 = 0.0;
    double drift_at_root = 0.0;
    double drift_lo = 0.0;  // drift at the bracket ends, reported on no-solution
    double drift_hi = 0.0;
    int iterations = 0;
    std::string message;
};

struct DriftReport {
    std::map<std::pair<std::size_t, std::size_t>, double> pair_terms;
    double eta = 0.0;
    double total = 0.0;  // sum of pair terms + eta
    bool numeric_chi_fallback = false;
    std::optional<BreakevenResult> breakeven;  // attached by the solving helpers

    void finalize() {
        total = eta;
        for (const auto& [ij, v] : pair_terms) total += v;
    }
};

namespace detail {

// sum over delta_{-ij} of [psi(1,1,.) - psi(1,0,.) - psi(0,1,.) + psi(0,0,.)]
// * prod_{k != i,j} p^delta q^(1-delta), at one factor point. This is the
// (2 delta_i - 1)(2 delta_j - 1) sum appearing in every pairwise drift.
inline double payoff_second_difference(const BasketPayoff& payoff,
                                       std::span<const double> pc,
                                       const std::vector<std::size_t>& alive,
                                       std::vector<int>& delta_full,
                                       std::size_t a, std::size_t b) {
    const std::size_t na = alive.size();
    std::function<double(std::size_t, double)> rec = [&](std::size_t lvl,
                                                         double prod) -> double {
        if (lvl == na) {
            const std::size_t i = alive[a], j = alive[b];
            delta_full[i] = 1; delta_full[j] = 1;
            double v = payoff.eval(delta_full);
            delta_full[j] = 0;
            v -= payoff.eval(delta_full);
            delta_full[i] = 0;
            v += payoff.eval(delta_full);
            delta_full[j] = 1;
            v -= payoff.eval(delta_full);
            delta_full[j] = 0;
            return prod * v;
        }
        if (lvl == a || lvl == b) return rec(lvl + 1, prod);
        const std::size_t k = alive[lvl];
        delta_full[k] = 1;
        const double hi = rec(lvl + 1, prod * pc[lvl]);
        delta_full[k] = 0;
        const double lo = rec(lvl + 1, prod * (1.0 - pc[lvl]));
        return hi + lo;
    };
    return rec(0, 1.0);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Gaussian drift in bracket form, 1F and pF. betas are the per-name
// sigma_it / phi(Phi^{-1}(Q_it)) volatility scales.

inline DriftReport drift_gauss(const BasketPayoff& payoff, const MarketState& market,
                               const CopulaSpec& copula,
                               const std::vector<double>& betas,
                               const Eigen::MatrixXd& spread_corr,
                               PricerOptions opt = {}) {
    market.validate();
    copula.validate();
    require_domain(copula.family == CopulaFamily::Gauss1F ||
                       copula.family == CopulaFamily::GaussPF,
                   "drift_gauss: copula must be Gaussian");
    const std::size_t n = market.size();
    require_shape(betas.size() == n && copula.names() == n &&
                      spread_corr.rows() == static_cast<Eigen::Index>(n),
                  "drift_gauss: input sizes disagree");
    for (double b : betas) require_domain(b >= 0.0, "drift_gauss: betas must be >= 0");
    if (payoff.kind == PayoffKind::Generic && n > BasketPayoff::kMaxGenericNames)
        throw CapacityError("drift_gauss: generic payoffs are capped at n = 20");

    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    const auto grid = detail::build_grid(copula, nn);
    const auto restr = detail::restrict_to_alive(market);
    const detail::CondTable ct =
        detail::cond_table(copula, market.survival, restr.alive, *grid, true);
    const std::size_t na = restr.alive.size();

    std::vector<double> phi_sbar(na);
    for (std::size_t a = 0; a < na; ++a)
        phi_sbar[a] = norm_pdf(norm_ppf_bar(market.survival[restr.alive[a]]));

    std::vector<int> delta_full(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (market.defaulted[i]) delta_full[i] = 1;

    DriftReport rep;
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = a + 1; b < na; ++b) {
            const std::size_t i = restr.alive[a], j = restr.alive[b];
            double integral = 0.0;
            for (std::size_t k = 0; k < grid->x.size(); ++k) {
                const double w2 = detail::payoff_second_difference(
                    payoff, ct.p_row(k), restr.alive, delta_full, a, b);
                // dp/dQ_i dp/dQ_j phi(sbar_i) phi(sbar_j)
                //   = phi(d_i) phi(d_j) / sqrt((1-|rho_i|^2)(1-|rho_j|^2))
                integral += grid->w[k] * w2 * ct.dq_row(k)[a] * ct.dq_row(k)[b] *
                            phi_sbar[a] * phi_sbar[b];
            }
            const double rr = copula.loadings.row(static_cast<Eigen::Index>(i))
                                  .dot(copula.loadings.row(static_cast<Eigen::Index>(j)));
            const double bracket =
                2.0 * betas[i] * betas[j] * spread_corr(i, j) -
                rr * (betas[i] * betas[i] + betas[j] * betas[j]);
            rep.pair_terms[{i, j}] = 0.5 * bracket * integral;
        }
    }
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// FpTD drift in counting-weight form: pair term (1-R)/2 * [rho_i rho_j (b_i^2+b_j^2)
// - 2 b_i b_j rho_ij] * A*_ij, with A*_ij the conditional-count weight at
// exactly p-1 defaults among the other names. A*_ij > 0 always.

// A*_ij: the positive conditional-count weight of pair (i,j) at exactly p-1
// defaults among the other names, integrated against phi(d_i) phi(d_j) and
// the factor density.
inline std::map<std::pair<std::size_t, std::size_t>, double> fptd_pair_weights(
    int p, const MarketState& market, const CopulaSpec& copula, PricerOptions opt = {}) {
    market.validate();
    copula.validate();
    require_domain(copula.family == CopulaFamily::Gauss1F,
                   "fptd_pair_weights: the counting weights are one-factor");
    const std::size_t n = market.size();
    require_domain(p >= 1 && static_cast<std::size_t>(p) <= n,
                   "fptd_pair_weights: order must lie in 1..n");

    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    const auto grid = detail::build_grid(copula, nn);
    const auto restr = detail::restrict_to_alive(market);
    const int count_target = p - 1 - restr.defaulted_count;
    const detail::CondTable ct =
        detail::cond_table(copula, market.survival, restr.alive, *grid, true);
    const std::size_t na = restr.alive.size();

    std::vector<double> phi_sbar(na);
    for (std::size_t a = 0; a < na; ++a)
        phi_sbar[a] = norm_pdf(norm_ppf_bar(market.survival[restr.alive[a]]));

    std::map<std::pair<std::size_t, std::size_t>, double> weights;
    std::vector<double> others, dist;
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = a + 1; b < na; ++b) {
            double a_star = 0.0;
            if (count_target >= 0) {
                for (std::size_t k = 0; k < grid->x.size(); ++k) {
                    const auto pk = ct.p_row(k);
                    others.clear();
                    for (std::size_t c = 0; c < na; ++c)
                        if (c != a && c != b) others.push_back(pk[c]);
                    double pmf;
                    if (others.empty()) {
                        pmf = (count_target == 0) ? 1.0 : 0.0;
                    } else {
                        detail::convolve_counts(others, dist);
                        pmf = (count_target < static_cast<int>(dist.size()))
                                  ? dist[count_target]
                                  : 0.0;
                    }
                    a_star += grid->w[k] * pmf * ct.dq_row(k)[a] * ct.dq_row(k)[b] *
                              phi_sbar[a] * phi_sbar[b];
                }
            }
            weights[{restr.alive[a], restr.alive[b]}] = a_star;
        }
    }
    return weights;
}

inline DriftReport drift_fptd(int p, const MarketState& market, const CopulaSpec& copula,
                              const std::vector<double>& betas,
                              const Eigen::MatrixXd& spread_corr,
                              PricerOptions opt = {}) {
    CopulaSpec cop = copula;
    if (cop.family == CopulaFamily::GaussPF && cop.p == 1) {
        // identical arithmetic to 1F: reuse the same code path
        std::vector<double> col(copula.loadings.rows());
        for (std::size_t i = 0; i < col.size(); ++i)
            col[i] = copula.loadings(static_cast<Eigen::Index>(i), 0);
        cop = CopulaSpec::gauss_1f(col);
    }
    const std::size_t n = market.size();
    require_shape(betas.size() == n && cop.names() == n &&
                      spread_corr.rows() == static_cast<Eigen::Index>(n),
                  "drift_fptd: input sizes disagree");
    for (double b : betas) require_domain(b >= 0.0, "drift_fptd: betas must be >= 0");
    const double rec = detail::common_recovery(market);

    const auto weights = fptd_pair_weights(p, market, cop, opt);
    DriftReport rep;
    for (const auto& [ij, a_star] : weights) {
        const auto [i, j] = ij;
        const double rho_i = cop.loadings(static_cast<Eigen::Index>(i), 0);
        const double rho_j = cop.loadings(static_cast<Eigen::Index>(j), 0);
        const double bracket =
            rho_i * rho_j * (betas[i] * betas[i] + betas[j] * betas[j]) -
            2.0 * betas[i] * betas[j] * spread_corr(i, j);
        rep.pair_terms[ij] = 0.5 * (1.0 - rec) * bracket * a_star;
    }
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// General 1-factor drift for an arbitrary conditional kernel. Volatilities
// sigma_i are the instantaneous dQ volatilities. Kernels without a
// closed-form chi fall back to wide-grid trapezoid integration (flagged).

struct DriftGeneralOptions {
    int n_nodes = 0;       // weighted-rule nodes for closed-form kernels
    int grid_points = 2001;  // trapezoid points for the numeric-chi fallback
    double x_lo = -8.0;    // real-line fallback window; half-line uses [0, x_hi]
    double x_hi = 8.0;
};

inline DriftReport drift_general(const BasketPayoff& payoff, const MarketState& market,
                                 const ConditionalKernel& kernel,
                                 const std::vector<double>& vols,
                                 const Eigen::MatrixXd& spread_corr,
                                 DriftGeneralOptions opt = {}) {
    market.validate();
    const std::size_t n = market.size();
    require_shape(kernel.n == n && vols.size() == n &&
                      spread_corr.rows() == static_cast<Eigen::Index>(n),
                  "drift_general: input sizes disagree");
    for (double v : vols)
        require_domain(v >= 0.0, "drift_general: volatilities must be >= 0");
    if (n > static_cast<std::size_t>(BasketPayoff::kMaxGenericNames))
        throw CapacityError("drift_general: capped at n = 20");

    const auto restr = detail::restrict_to_alive(market);
    const std::size_t na = restr.alive.size();
    std::vector<int> delta_full(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (market.defaulted[i]) delta_full[i] = 1;

    // factor evaluation points: weighted rule (weights absorb f_X) or plain
    // trapezoid grid with explicit density
    std::vector<double> xs, ws;
    bool weighted = kernel.closed_form_chi && kernel.make_rule;
    DriftReport rep;
    if (weighted) {
        const int nn = opt.n_nodes > 0
                           ? opt.n_nodes
                           : (kernel.domain == FactorDomain::RealLine
                                  ? kDefaultHermiteNodes
                                  : kDefaultLaguerreNodes);
        const QuadratureRule rule = kernel.make_rule(nn);
        xs = rule.nodes;
        ws = rule.weights;
    } else {
        rep.numeric_chi_fallback = true;
        // half-line grids start a hair above zero: Gamma densities with shape
        // below one blow up at the origin
        const double lo = kernel.domain == FactorDomain::RealLine ? opt.x_lo : 1e-9;
        xs = linspace(lo, opt.x_hi, opt.grid_points);
        ws.assign(xs.size(), 0.0);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double h = 0.0;
            if (k > 0) h += 0.5 * (xs[k] - xs[k - 1]);
            if (k + 1 < xs.size()) h += 0.5 * (xs[k + 1] - xs[k]);
            ws[k] = h * kernel.density(xs[k]);  // trapezoid with density folded in
        }
    }

    const std::size_t m = xs.size();
    std::vector<std::vector<double>> pc(m, std::vector<double>(na));
    std::vector<std::vector<double>> dpq(m, std::vector<double>(na));
    std::vector<std::vector<double>> dpx(m, std::vector<double>(na));
    std::vector<std::vector<double>> chi_over_f(m, std::vector<double>(na));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t a = 0; a < na; ++a) {
            const std::size_t i = restr.alive[a];
            const double q = market.survival[i];
            pc[k][a] = kernel.p(i, q, xs[k]);
            dpq[k][a] = kernel.dp_dq(i, q, xs[k]);
            dpx[k][a] = kernel.dp_dx(i, q, xs[k]);
            const double fx = kernel.density(xs[k]);
            chi_over_f[k][a] = fx > 0.0 ? kernel.chi(i, q, xs[k]) / fx : 0.0;
        }
    }

    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = a + 1; b < na; ++b) {
            const std::size_t i = restr.alive[a], j = restr.alive[b];
            const double si = vols[i], sj = vols[j];
            double term = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                const double w2 = detail::payoff_second_difference(
                    payoff, pc[k], restr.alive, delta_full, a, b);
                const double bracket =
                    2.0 * si * sj * spread_corr(i, j) * dpq[k][a] * dpq[k][b] -
                    si * si * dpx[k][b] * chi_over_f[k][a] -
                    sj * sj * dpx[k][a] * chi_over_f[k][b];
                term += ws[k] * w2 * bracket;
            }
            rep.pair_terms[{i, j}] = 0.5 * term;
        }
    }

    // Boundary residual: exactly zero whenever chi vanishes at the factor
    // domain edges (Gaussian, Clayton); estimated at the window edges for
    // numeric kernels.
    if (!kernel.closed_form_chi) {
        const double lo = kernel.domain == FactorDomain::RealLine ? opt.x_lo : 1e-9;
        double eta = 0.0;
        for (std::size_t a = 0; a < na; ++a) {
            const std::size_t i = restr.alive[a];
            const double q = market.survival[i];
            const double si = vols[i];
            for (double edge : {opt.x_hi, lo}) {
                const double sign = (edge == opt.x_hi) ? 1.0 : -1.0;
                const double chi_e = kernel.chi(i, q, edge);
                if (chi_e == 0.0) continue;
                // G_i(edge) = sum_delta psi (2 delta_i - 1) prod_{j != i} p^d q^(1-d)
                std::vector<double> pc_edge(na);
                for (std::size_t c = 0; c < na; ++c)
                    pc_edge[c] = kernel.p(restr.alive[c], market.survival[restr.alive[c]],
                                          edge);
                std::function<double(std::size_t, double)> rec =
                    [&](std::size_t lvl, double prod) -> double {
                    if (lvl == na) {
                        delta_full[i] = 1;
                        double v = payoff.eval(delta_full);
                        delta_full[i] = 0;
                        v -= payoff.eval(delta_full);
                        return prod * v;
                    }
                    if (lvl == a) return rec(lvl + 1, prod);
                    const std::size_t cidx = restr.alive[lvl];
                    delta_full[cidx] = 1;
                    const double hi2 = rec(lvl + 1, prod * pc_edge[lvl]);
                    delta_full[cidx] = 0;
                    const double lo2 = rec(lvl + 1, prod * (1.0 - pc_edge[lvl]));
                    return hi2 + lo2;
                };
                eta += sign * 0.5 * si * si * chi_e * rec(0, 1.0);
            }
        }
        rep.eta = eta;
    }
    rep.finalize();
    return rep;
}

// ---------------------------------------------------------------------------
// Pointwise residual of the replication PDE over a (Q, x) grid, maximized
// over name pairs. sigma(i, Q) and rho(i, j, Q_i, Q_j) supply the dynamics.

inline double check_replication_pde(
    const ConditionalKernel& kernel,
    const std::function<double(std::size_t, double)>& sigma,
    const std::function<double(std::size_t, std::size_t, double, double)>& rho,
    const std::vector<double>& q_grid, const std::vector<double>& x_grid) {
    require_domain(kernel.n >= 2, "check_replication_pde: need at least two names");
    double worst = 0.0;
    for (std::size_t i = 0; i < kernel.n; ++i) {
        for (std::size_t j = i + 1; j < kernel.n; ++j) {
            for (double qi : q_grid) {
                for (double qj : q_grid) {
                    const double si = sigma(i, qi), sj = sigma(j, qj);
                    const double rij = rho(i, j, qi, qj);
                    for (double x : x_grid) {
                        const double fx = kernel.density(x);
                        const double lhs = 2.0 * si * sj * rij * kernel.dp_dq(i, qi, x) *
                                           kernel.dp_dq(j, qj, x) * fx;
                        const double rhs = si * si * kernel.dp_dx(j, qj, x) *
                                               kernel.chi(i, qi, x) +
                                           sj * sj * kernel.dp_dx(i, qi, x) *
                                               kernel.chi(j, qj, x);
                        worst = std::max(worst, std::fabs(lhs - rhs));
                    }
                }
            }
        }
    }
    return worst;
}

} // namespace becor
