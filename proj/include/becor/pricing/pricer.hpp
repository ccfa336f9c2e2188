#pragma once

// Prices of European basket payoffs under a factor copula (value =
// sum_delta psi(delta) * integral of prod p^delta q^(1-delta) f_X), with
// per-name dV/dQ_i sensitivities. Generic payoffs enumerate the 2^n indicator
// vectors per quadrature node; FpTD builds the conditional number-of-defaults
// distribution by sequential convolution and scales to hundreds of names.
// Defaulted names enter as delta_i = 1 deterministically.

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "becor/copula/kernel.hpp"
#include "becor/core/copula.hpp"
#include "becor/core/market.hpp"
#include "becor/core/payoff.hpp"
#include "becor/errors.hpp"
#include "becor/math/quadrature.hpp"

namespace becor {

struct PricerOptions {
    int n_nodes = 0;            // 0 = family default
    bool error_estimate = false;  // reprice at half the nodes and report the gap
};

struct PriceResult {
    double value = 0.0;
    std::vector<double> deltas;  // filled by deltas(), empty from plain pricing
    int node_count = 0;
    std::optional<double> error_estimate;
};

enum class DeltaMode { Analytic, Bump };

struct DeltaResult {
    std::vector<double> values;
    DeltaMode mode = DeltaMode::Analytic;
    std::vector<std::string> warnings;
};

namespace detail {

// Flattened factor grid: scalar nodes for one-factor families, tensor points
// for GaussPF. Weights sum to one.
struct FactorGrid {
    std::vector<std::vector<double>> x;
    std::vector<double> w;
    int node_count = 0;
};

inline int default_nodes(const CopulaSpec& c) {
    switch (c.family) {
    case CopulaFamily::Gauss1F: return kDefaultHermiteNodes;
    case CopulaFamily::GaussPF: return c.p == 1 ? kDefaultHermiteNodes : kDefaultTensorNodes;
    case CopulaFamily::Clayton: return kDefaultLaguerreNodes;
    }
    return kDefaultHermiteNodes;
}

inline FactorGrid build_grid_uncached(const CopulaSpec& c, int n_nodes) {
    FactorGrid g;
    g.node_count = n_nodes;
    if (c.family == CopulaFamily::GaussPF && c.p > 1) {
        const QuadratureRule rule = tensor_hermite(n_nodes, c.p);
        std::vector<int> idx(c.p, 0);
        while (true) {
            std::vector<double> pt(c.p);
            double w = 1.0;
            for (int k = 0; k < c.p; ++k) {
                pt[k] = rule.nodes[idx[k]];
                w *= rule.weights[idx[k]];
            }
            g.x.push_back(std::move(pt));
            g.w.push_back(w);
            int k = 0;
            while (k < c.p && ++idx[k] == n_nodes) idx[k++] = 0;
            if (k == c.p) break;
        }
    } else {
        const QuadratureRule rule = (c.family == CopulaFamily::Clayton)
                                        ? gauss_laguerre_cached(n_nodes, 1.0 / c.theta)
                                        : gauss_hermite_cached(n_nodes);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            g.x.push_back({rule.nodes[i]});
            g.w.push_back(rule.weights[i]);
        }
    }
    return g;
}

// Grids depend only on (family, nodes, dimension, theta); loadings enter the
// conditional table, so grids cache cleanly behind shared ownership.
inline std::shared_ptr<const FactorGrid> build_grid(const CopulaSpec& c, int n_nodes) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int, double>,
                    std::shared_ptr<const FactorGrid>> cache;
    const auto key = std::make_tuple(static_cast<int>(c.family), n_nodes,
                                     c.family == CopulaFamily::GaussPF ? c.p : 1,
                                     c.family == CopulaFamily::Clayton ? c.theta : 0.0);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_shared<const FactorGrid>(
                                    build_grid_uncached(c, n_nodes)))
                 .first;
    return it->second;
}

// Conditional default probabilities and dp/dQ, flattened [point * names + a].
struct CondTable {
    std::size_t na = 0;
    std::vector<double> p;
    std::vector<double> dp_dq;

    std::span<const double> p_row(std::size_t k) const {
        return {p.data() + k * na, na};
    }
    std::span<const double> dq_row(std::size_t k) const {
        return {dp_dq.data() + k * na, na};
    }
};

inline CondTable cond_table(const CopulaSpec& c, const std::vector<double>& survival,
                            const std::vector<std::size_t>& alive,
                            const FactorGrid& grid, bool with_dq) {
    if (c.family == CopulaFamily::Clayton)
        require_domain(c.theta > 0.0, "pricer: Clayton theta must be > 0 for pricing");
    CondTable t;
    const std::size_t m = grid.x.size(), na = alive.size();
    t.na = na;
    t.p.resize(m * na);
    if (with_dq) t.dp_dq.resize(m * na);
    for (std::size_t a = 0; a < na; ++a) {
        const std::size_t i = alive[a];
        const double q = survival[i];
        if (c.family == CopulaFamily::Clayton) {
            const double rate = clayton_rate(q, c.theta);
            const double dq_factor = -c.theta * std::pow(1.0 - q, -c.theta - 1.0);
            for (std::size_t k = 0; k < m; ++k) {
                const double x = grid.x[k][0];
                // exp underflows (slowly) past ~-700; the value is zero anyway
                const double e = x * rate;
                const double pv = e > 690.0 ? 0.0 : std::exp(-e);
                t.p[k * na + a] = pv;
                if (with_dq) t.dp_dq[k * na + a] = x * dq_factor * pv;
            }
        } else {
            const double sbar = norm_ppf_bar(q);
            double norm2 = 0.0;
            for (int kk = 0; kk < c.p; ++kk)
                norm2 += c.loadings(static_cast<Eigen::Index>(i), kk) *
                         c.loadings(static_cast<Eigen::Index>(i), kk);
            const double den = std::sqrt(1.0 - norm2);
            const double psbar = norm_pdf(sbar);
            for (std::size_t k = 0; k < m; ++k) {
                double dot = 0.0;
                for (int kk = 0; kk < c.p; ++kk)
                    dot += c.loadings(static_cast<Eigen::Index>(i), kk) * grid.x[k][kk];
                const double d = (sbar - dot) / den;
                // erfc is exactly 0/1 in double beyond |d| ~ 28 and the pdf is
                // below 1e-190; skip the subnormal-heavy library calls there
                if (d > 30.0) {
                    t.p[k * na + a] = 1.0;
                    if (with_dq) t.dp_dq[k * na + a] = 0.0;
                } else if (d < -30.0) {
                    t.p[k * na + a] = 0.0;
                    if (with_dq) t.dp_dq[k * na + a] = 0.0;
                } else {
                    t.p[k * na + a] = norm_cdf(d);
                    if (with_dq) t.dp_dq[k * na + a] = -norm_pdf(d) / (psbar * den);
                }
            }
        }
    }
    return t;
}

// Distribution of the number of defaults from the given conditional
// probabilities (sequential Bernoulli convolution).
inline void convolve_counts(std::span<const double> pc, std::vector<double>& dist) {
    dist.assign(pc.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const double p = pc[i], q = 1.0 - p;
        for (std::size_t k = i + 1; k-- > 0;) {
            dist[k + 1] += dist[k] * p;
            dist[k] *= q;
        }
    }
}

// Enumerates the 2^na indicator vectors, accumulating prod p^d q^(1-d) * psi.
// psi sees the full-basket vector with defaulted names pinned at 1.
inline double enumerate_payoff(std::span<const double> pc,
                               const std::vector<std::size_t>& alive,
                               std::vector<int>& delta_full,
                               const BasketPayoff& payoff) {
    const std::size_t na = alive.size();
    std::function<double(std::size_t, double)> rec = [&](std::size_t lvl,
                                                         double prod) -> double {
        if (prod == 0.0) return 0.0;
        if (lvl == na) return prod * payoff.eval(delta_full);
        const std::size_t i = alive[lvl];
        delta_full[i] = 1;
        const double a = rec(lvl + 1, prod * pc[lvl]);
        delta_full[i] = 0;
        const double b = rec(lvl + 1, prod * (1.0 - pc[lvl]));
        return a + b;
    };
    return rec(0, 1.0);
}

struct Restriction {
    std::vector<std::size_t> alive;
    int defaulted_count = 0;
};

inline Restriction restrict_to_alive(const MarketState& market) {
    Restriction r;
    for (std::size_t i = 0; i < market.size(); ++i) {
        if (market.defaulted[i]) ++r.defaulted_count;
        else r.alive.push_back(i);
    }
    return r;
}

inline double common_recovery(const MarketState& market) {
    require_domain(!market.recovery.empty(), "pricer: empty basket");
    const double r0 = market.recovery.front();
    for (double r : market.recovery)
        require_domain(r == r0, "pricer: FpTD needs a common recovery rate");
    return r0;
}

inline double price_generic_value(const BasketPayoff& payoff, const MarketState& market,
                                  const CopulaSpec& copula, int n_nodes) {
    const auto restr = restrict_to_alive(market);
    const auto grid = build_grid(copula, n_nodes);
    const CondTable ct = cond_table(copula, market.survival, restr.alive, *grid, false);
    std::vector<int> delta_full(market.size(), 0);
    for (std::size_t i = 0; i < market.size(); ++i)
        if (market.defaulted[i]) delta_full[i] = 1;
    double acc = 0.0;
    for (std::size_t k = 0; k < grid->x.size(); ++k)
        acc += grid->w[k] * enumerate_payoff(ct.p_row(k), restr.alive, delta_full, payoff);
    return acc;
}

inline double price_fptd_value(int p, const MarketState& market,
                               const CopulaSpec& copula, int n_nodes) {
    const auto restr = restrict_to_alive(market);
    const double rec = common_recovery(market);
    const int d0 = restr.defaulted_count;
    if (d0 >= p) return p * (1.0 - rec);  // payoff already capped
    const auto grid = build_grid(copula, n_nodes);
    const CondTable ct = cond_table(copula, market.survival, restr.alive, *grid, false);
    const int cap = p - d0;
    double acc = 0.0;
    std::vector<double> dist;
    for (std::size_t k = 0; k < grid->x.size(); ++k) {
        convolve_counts(ct.p_row(k), dist);
        double v = 0.0;
        for (std::size_t m = 0; m < dist.size(); ++m)
            v += std::min<int>(static_cast<int>(m), cap) * dist[m];
        acc += grid->w[k] * v;
    }
    return (1.0 - rec) * (acc + d0);
}

// Value and analytic dV/dQ in one pass over the factor grid; the hedge loop
// calls this every rebalance step.
struct FptdValueDeltas {
    double value = 0.0;
    std::vector<double> dv_dq;
};

inline FptdValueDeltas fptd_value_and_deltas(int p, const MarketState& market,
                                             const CopulaSpec& copula, int n_nodes) {
    const auto restr = restrict_to_alive(market);
    const double rec = common_recovery(market);
    const int d0 = restr.defaulted_count;
    FptdValueDeltas out;
    out.dv_dq.assign(market.size(), 0.0);
    if (d0 >= p) {
        out.value = p * (1.0 - rec);
        return out;
    }
    const int cap = p - d0;
    const auto grid = build_grid(copula, n_nodes);
    const CondTable ct = cond_table(copula, market.survival, restr.alive, *grid, true);
    const std::size_t na = restr.alive.size();
    double acc = 0.0;
    std::vector<double> dist, others, d2;
    for (std::size_t k = 0; k < grid->x.size(); ++k) {
        const auto pk = ct.p_row(k);
        convolve_counts(pk, dist);
        double v = 0.0;
        for (std::size_t m = 0; m < dist.size(); ++m)
            v += std::min<int>(static_cast<int>(m), cap) * dist[m];
        acc += grid->w[k] * v;
        for (std::size_t a = 0; a < na; ++a) {
            others.clear();
            for (std::size_t b = 0; b < na; ++b)
                if (b != a) others.push_back(pk[b]);
            convolve_counts(others, d2);
            double tail = 0.0;
            for (int m = 0; m < cap && m < static_cast<int>(d2.size()); ++m) tail += d2[m];
            out.dv_dq[restr.alive[a]] += grid->w[k] * (1.0 - rec) * ct.dp_dq[k * na + a] * tail;
        }
    }
    out.value = (1.0 - rec) * (acc + d0);
    return out;
}

} // namespace detail

// ---------------------------------------------------------------------------

inline PriceResult price_generic(const BasketPayoff& payoff, const MarketState& market,
                                 const CopulaSpec& copula, PricerOptions opt = {}) {
    market.validate();
    copula.validate();
    require_shape(static_cast<std::size_t>(payoff.n) == market.size(),
                  "price_generic: payoff and market sizes disagree");
    if (payoff.n > BasketPayoff::kMaxGenericNames)
        throw CapacityError("price_generic: 2^n enumeration is capped at n = 20; "
                            "use price_fptd's counting recursion for larger baskets");
    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    PriceResult out;
    out.node_count = nn;
    out.value = detail::price_generic_value(payoff, market, copula, nn);
    if (opt.error_estimate) {
        const double coarse =
            detail::price_generic_value(payoff, market, copula, std::max(nn / 2, 1));
        out.error_estimate = std::max(std::fabs(out.value - coarse),
                                      quadrature_error_floor(out.value));
    }
    return out;
}

inline PriceResult price_fptd(int p, const MarketState& market, const CopulaSpec& copula,
                              PricerOptions opt = {}) {
    market.validate();
    copula.validate();
    require_domain(p >= 1 && static_cast<std::size_t>(p) <= market.size(),
                   "price_fptd: order must lie in 1..n");
    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    PriceResult out;
    out.node_count = nn;
    out.value = detail::price_fptd_value(p, market, copula, nn);
    if (opt.error_estimate) {
        const double coarse =
            detail::price_fptd_value(p, market, copula, std::max(nn / 2, 1));
        out.error_estimate = std::max(std::fabs(out.value - coarse),
                                      quadrature_error_floor(out.value));
    }
    return out;
}

// Worst-of digital put: 1 - integral of prod (1 - Phi((Phi^{-1}(P_i) - rho_i'x)
// / sqrt(1-|rho_i|^2))) over the factor density. Maps one-to-one onto an FTD
// with Q = 1-P and zero recovery.
inline double price_worst_of_digital(const std::vector<double>& puts,
                                     const CopulaSpec& copula, PricerOptions opt = {}) {
    copula.validate();
    require_shape(puts.size() == copula.names(),
                  "price_worst_of_digital: puts and loadings sizes disagree");
    std::vector<double> survival(puts.size());
    for (std::size_t i = 0; i < puts.size(); ++i) {
        require_domain(puts[i] > 0.0 && puts[i] < 1.0,
                       "price_worst_of_digital: put prices must lie in (0,1)");
        survival[i] = 1.0 - puts[i];
    }
    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    const auto grid = detail::build_grid(copula, nn);
    std::vector<std::size_t> alive(puts.size());
    for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = i;
    const detail::CondTable ct = detail::cond_table(copula, survival, alive, *grid, false);
    double acc = 0.0;
    for (std::size_t k = 0; k < grid->x.size(); ++k) {
        double prod = 1.0;
        const auto pk = ct.p_row(k);
        for (std::size_t i = 0; i < alive.size(); ++i) prod *= 1.0 - pk[i];
        acc += grid->w[k] * prod;
    }
    return 1.0 - acc;
}

inline DeltaResult deltas(const BasketPayoff& payoff, const MarketState& market,
                          const CopulaSpec& copula, DeltaMode mode,
                          PricerOptions opt = {}) {
    market.validate();
    copula.validate();
    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(copula);
    DeltaResult out;
    out.mode = mode;
    out.values.assign(market.size(), 0.0);

    const auto restr = detail::restrict_to_alive(market);
    if (mode == DeltaMode::Bump) {
        auto price = [&](const MarketState& m) {
            return payoff.kind == PayoffKind::FpTD || payoff.kind == PayoffKind::WorstOfDigital
                       ? detail::price_fptd_value(payoff.order ? payoff.order : 1, m,
                                                  copula, nn)
                       : detail::price_generic_value(payoff, m, copula, nn);
        };
        for (std::size_t i : restr.alive) {
            double h = 1e-5;
            const double q = market.survival[i];
            if (q - h <= 0.0 || q + h >= 1.0) {
                h = 0.45 * std::min(q, 1.0 - q);
                out.warnings.push_back("bump step shrunk for name " + std::to_string(i) +
                                       " to keep Q inside (0,1)");
            }
            MarketState up = market, dn = market;
            up.survival[i] = q + h;
            dn.survival[i] = q - h;
            out.values[i] = (price(up) - price(dn)) / (2.0 * h);
        }
        return out;
    }

    // Analytic: differentiate under the integral with dp/dQ from the kernel.
    const auto grid = detail::build_grid(copula, nn);
    const detail::CondTable ct =
        detail::cond_table(copula, market.survival, restr.alive, *grid, true);
    const std::size_t na = restr.alive.size();

    if (payoff.kind == PayoffKind::FpTD || payoff.kind == PayoffKind::WorstOfDigital) {
        const int p = payoff.order ? payoff.order : 1;
        const double rec = detail::common_recovery(market);
        const int d0 = restr.defaulted_count;
        if (d0 >= p) return out;  // payoff saturated, all deltas zero
        const int cap = p - d0;
        // dV/dQ_i = (1-R) int dp_i/dQ * P(N_{-i} <= cap-1 | x) f_X dx
        std::vector<double> dist;
        std::vector<double> others;
        others.reserve(na);
        for (std::size_t k = 0; k < grid->x.size(); ++k) {
            const auto pk = ct.p_row(k);
            for (std::size_t a = 0; a < na; ++a) {
                others.clear();
                for (std::size_t b = 0; b < na; ++b)
                    if (b != a) others.push_back(pk[b]);
                detail::convolve_counts(others, dist);
                double tail = 0.0;
                for (int m = 0; m < cap && m < static_cast<int>(dist.size()); ++m)
                    tail += dist[m];
                out.values[restr.alive[a]] +=
                    grid->w[k] * (1.0 - rec) * ct.dp_dq[k * na + a] * tail;
            }
        }
        return out;
    }

    // Generic payoff: per name, enumerate the other names' indicators.
    std::vector<int> delta_full(market.size(), 0);
    for (std::size_t i = 0; i < market.size(); ++i)
        if (market.defaulted[i]) delta_full[i] = 1;
    for (std::size_t a = 0; a < na; ++a) {
        std::vector<std::size_t> others;
        for (std::size_t b = 0; b < na; ++b)
            if (b != a) others.push_back(b);
        double acc = 0.0;
        for (std::size_t k = 0; k < grid->x.size(); ++k) {
            const auto pk = ct.p_row(k);
            const std::size_t i = restr.alive[a];
            std::function<double(std::size_t, double)> rec_fn =
                [&](std::size_t lvl, double prod) -> double {
                if (lvl == others.size()) {
                    delta_full[i] = 1;
                    const double up = payoff.eval(delta_full);
                    delta_full[i] = 0;
                    const double dn = payoff.eval(delta_full);
                    return prod * (up - dn);
                }
                const std::size_t b = others[lvl];
                const std::size_t j = restr.alive[b];
                delta_full[j] = 1;
                const double hi = rec_fn(lvl + 1, prod * pk[b]);
                delta_full[j] = 0;
                const double lo = rec_fn(lvl + 1, prod * (1.0 - pk[b]));
                return hi + lo;
            };
            acc += grid->w[k] * ct.dp_dq[k * na + a] * rec_fn(0, 1.0);
        }
        out.values[restr.alive[a]] = acc;
    }
    return out;
}

} // namespace becor
