#pragma once

// Delta-hedging P&L engine over simulated (or ingested) survival paths.
// Instruments are upfront-style: the tranche marks at its model value, each
// CDS marks at (1-R_i)(1-Q_i), so dCDS = -dQ (1-R). The cash account earns
// nothing and every rebalance is value-neutral, which pins the self-financing
// identity: P&L increment = dV - sum_i h_i dCDS_i.

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "becor/core/copula.hpp"
#include "becor/core/market.hpp"
#include "becor/core/payoff.hpp"
#include "becor/errors.hpp"
#include "becor/pricing/pricer.hpp"
#include "becor/sim/paths.hpp"

namespace becor {

struct HedgeLedger {
    std::vector<double> times;
    std::size_t n_paths = 0;
    std::size_t n_names = 0;
    int window_steps = 6;

    // flattened [path][step] and [path][step][name]
    std::vector<double> value;      // tranche mark V_t
    std::vector<double> cash;       // cash account
    std::vector<double> pnl;        // cumulative hedged P&L
    std::vector<double> cds_units;  // hedge positions h_i (units of CDS_i)
    std::vector<double> cds_price;  // CDS upfront marks (1-R_i)(1-Q_i)
    std::vector<double> dv_dq;      // model dV/dQ_i at each rebalance

    double value_at(std::size_t p, std::size_t m) const {
        return value[p * times.size() + m];
    }
    double pnl_at(std::size_t p, std::size_t m) const {
        return pnl[p * times.size() + m];
    }
    double cash_at(std::size_t p, std::size_t m) const {
        return cash[p * times.size() + m];
    }
    double units_at(std::size_t p, std::size_t m, std::size_t i) const {
        return cds_units[(p * times.size() + m) * n_names + i];
    }
    double cds_at(std::size_t p, std::size_t m, std::size_t i) const {
        return cds_price[(p * times.size() + m) * n_names + i];
    }
    double dv_dq_at(std::size_t p, std::size_t m, std::size_t i) const {
        return dv_dq[(p * times.size() + m) * n_names + i];
    }

    // P&L accrued over the rolling window starting at rebalance k.
    double window_pnl(std::size_t path, std::size_t k) const {
        return pnl_at(path, k + window_steps) - pnl_at(path, k);
    }
    std::size_t window_count() const {
        return times.size() > static_cast<std::size_t>(window_steps)
                   ? times.size() - window_steps
                   : 0;
    }
};

struct HedgeOptions {
    int n_nodes = 0;              // pricer nodes, 0 = family default
    bool recompute_deltas = true;  // rebalance hedge ratios at every step
    int window_steps = 6;
};

// Runs the delta hedge along every path of the set. Pricing model and payoff
// are fixed; the recovery comes from the market template (common recovery for
// FpTD payoffs).
inline HedgeLedger run_hedge(const PathSet& paths, const BasketPayoff& payoff,
                             const CopulaSpec& pricing_copula,
                             const MarketState& market_template,
                             HedgeOptions opt = {}) {
    market_template.validate();
    require_shape(market_template.size() == paths.n_names,
                  "run_hedge: market template and path set sizes disagree");
    require_domain(paths.times.back() < market_template.maturity,
                   "run_hedge: paths must stay before maturity");
    const std::size_t n = paths.n_names;
    const std::size_t steps = paths.times.size();
    const bool fptd_like =
        payoff.kind == PayoffKind::FpTD || payoff.kind == PayoffKind::WorstOfDigital;
    const int nn = opt.n_nodes > 0 ? opt.n_nodes : detail::default_nodes(pricing_copula);

    HedgeLedger led;
    led.times = paths.times;
    led.n_paths = paths.n_paths;
    led.n_names = n;
    led.window_steps = opt.window_steps;
    led.value.resize(paths.n_paths * steps);
    led.cash.resize(paths.n_paths * steps);
    led.pnl.resize(paths.n_paths * steps);
    led.cds_units.resize(paths.n_paths * steps * n);
    led.cds_price.resize(paths.n_paths * steps * n);
    led.dv_dq.resize(paths.n_paths * steps * n);

    MarketState market = market_template;
    std::vector<double> h(n, 0.0);

    auto value_and_deltas = [&](detail::FptdValueDeltas& out) {
        if (fptd_like) {
            out = detail::fptd_value_and_deltas(payoff.order ? payoff.order : 1, market,
                                                pricing_copula, nn);
        } else {
            out.value = detail::price_generic_value(payoff, market, pricing_copula, nn);
            out.dv_dq =
                deltas(payoff, market, pricing_copula, DeltaMode::Analytic, {.n_nodes = nn})
                    .values;
        }
    };

    detail::FptdValueDeltas vd;
    for (std::size_t path = 0; path < paths.n_paths; ++path) {
        double cash = 0.0;
        for (std::size_t m = 0; m < steps; ++m) {
            market.t = paths.times[m];
            for (std::size_t i = 0; i < n; ++i)
                market.survival[i] = paths.at(path, m, i);
            try {
                value_and_deltas(vd);
            } catch (const std::exception& e) {
                throw NumericError("run_hedge: pricing failed at step " +
                                   std::to_string(m) + ": " + e.what());
            }
            std::vector<double> cds(n);
            for (std::size_t i = 0; i < n; ++i)
                cds[i] = (1.0 - market.recovery[i]) * (1.0 - market.survival[i]);

            const std::size_t base = path * steps + m;
            if (m == 0) {
                // open: buy the tranche, sell h_i units of each CDS
                for (std::size_t i = 0; i < n; ++i)
                    h[i] = -vd.dv_dq[i] / (1.0 - market.recovery[i]);
                cash = -vd.value;
                for (std::size_t i = 0; i < n; ++i) cash += h[i] * cds[i];
                led.pnl[base] = 0.0;
            } else {
                // mark the carried position, then rebalance at the new marks
                double w = vd.value + cash;
                for (std::size_t i = 0; i < n; ++i) w -= h[i] * cds[i];
                led.pnl[base] = w;
                if (opt.recompute_deltas && m + 1 < steps) {
                    for (std::size_t i = 0; i < n; ++i) {
                        const double h_new = -vd.dv_dq[i] / (1.0 - market.recovery[i]);
                        cash += (h_new - h[i]) * cds[i];
                        h[i] = h_new;
                    }
                }
            }
            led.value[base] = vd.value;
            led.cash[base] = cash;
            for (std::size_t i = 0; i < n; ++i) {
                led.cds_units[base * n + i] = h[i];
                led.cds_price[base * n + i] = cds[i];
                led.dv_dq[base * n + i] = vd.dv_dq[i];
            }
        }
    }
    return led;
}

// ---------------------------------------------------------------------------
// Empirical break-even extraction: for each path and rolling window, the
// flat pricing correlation at which the windowed P&L crosses zero across an
// ascending candidate grid (linear interpolation between grid points; first
// sign change wins; windows without a crossing stay missing).

struct EmpiricalBreakeven {
    std::vector<double> window_start_times;
    std::vector<std::vector<std::optional<double>>> rho2;  // [path][window]

    double mean() const {
        long double acc = 0.0L;
        std::size_t count = 0;
        for (const auto& series : rho2)
            for (const auto& v : series)
                if (v) { acc += *v; ++count; }
        return count ? static_cast<double>(acc / count) : 0.0;
    }
    std::size_t missing_count() const {
        std::size_t miss = 0;
        for (const auto& series : rho2)
            for (const auto& v : series)
                if (!v) ++miss;
        return miss;
    }
};

inline EmpiricalBreakeven empirical_breakeven(const std::vector<double>& rho2_grid,
                                              const std::vector<HedgeLedger>& ledgers,
                                              int window_steps = 6) {
    require_shape(rho2_grid.size() == ledgers.size() && rho2_grid.size() >= 2,
                  "empirical_breakeven: one ledger per candidate correlation");
    for (std::size_t g = 1; g < rho2_grid.size(); ++g)
        require_domain(rho2_grid[g] > rho2_grid[g - 1],
                       "empirical_breakeven: candidate grid must increase");
    const auto& first = ledgers.front();
    for (const auto& led : ledgers)
        require_shape(led.n_paths == first.n_paths && led.times == first.times,
                      "empirical_breakeven: ledgers disagree on paths or grid");

    EmpiricalBreakeven out;
    const std::size_t windows =
        first.times.size() > static_cast<std::size_t>(window_steps)
            ? first.times.size() - window_steps
            : 0;
    out.window_start_times.resize(windows);
    for (std::size_t k = 0; k < windows; ++k) out.window_start_times[k] = first.times[k];
    out.rho2.assign(first.n_paths, std::vector<std::optional<double>>(windows));

    std::vector<double> w(rho2_grid.size());
    for (std::size_t path = 0; path < first.n_paths; ++path) {
        for (std::size_t k = 0; k < windows; ++k) {
            for (std::size_t g = 0; g < ledgers.size(); ++g) {
                const auto& led = ledgers[g];
                w[g] = led.pnl_at(path, k + window_steps) - led.pnl_at(path, k);
            }
            for (std::size_t g = 1; g < w.size(); ++g) {
                if (w[g] == 0.0) {
                    out.rho2[path][k] = rho2_grid[g];
                    break;
                }
                if ((w[g - 1] < 0.0) != (w[g] < 0.0)) {
                    const double frac = w[g - 1] / (w[g - 1] - w[g]);
                    out.rho2[path][k] =
                        rho2_grid[g - 1] + frac * (rho2_grid[g] - rho2_grid[g - 1]);
                    break;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exponential smoothing with gaps: weighted average of the current and the
// `lookback` previous present values, weights exp(-lambda k).

inline std::vector<std::optional<double>> smooth_breakeven(
    const std::vector<std::optional<double>>& series, double lambda = 0.3,
    int lookback = 3) {
    std::vector<std::optional<double>> out(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= lookback; ++j) {
            if (j > static_cast<int>(k)) break;
            const auto& v = series[k - j];
            if (!v) continue;
            const double w = std::exp(-lambda * j);
            num += w * *v;
            den += w;
        }
        if (den > 0.0) out[k] = num / den;
    }
    return out;
}

} // namespace becor
