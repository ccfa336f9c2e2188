#pragma once

// One-period Merton bridge: the beta <-> psi transforms
// beta_t = psi(t)/sqrt(int_t^T psi^2),  psi(t) = C beta_t exp(-int_0^t beta^2/2),
// the implied asset-value correlation, and the conditional-probability
// martingale check of the psi = 1 model.

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "becor/errors.hpp"
#include "becor/math/integrate1d.hpp"
#include "becor/math/normal.hpp"
#include "becor/sim/rng.hpp"

namespace becor {

inline double merton_beta_from_psi(const std::function<double(double)>& psi, double t,
                                   double maturity, int panels = 2048) {
    require_domain(t >= 0.0 && t < maturity, "merton_beta_from_psi: need t in [0,T)");
    const double tail =
        integrate_simpson([&](double u) { return psi(u) * psi(u); }, t, maturity, panels);
    require_domain(tail > 0.0, "merton_beta_from_psi: int_t^T psi^2 must be positive");
    return psi(t) / std::sqrt(tail);
}

inline double merton_psi_from_beta(const std::function<double(double)>& beta, double t,
                                   double scale = 1.0, int panels = 2048) {
    require_domain(t >= 0.0, "merton_psi_from_beta: need t >= 0");
    const double cum =
        t == 0.0 ? 0.0
                 : integrate_simpson([&](double u) { return beta(u) * beta(u); }, 0.0, t,
                                     panels);
    return scale * beta(t) * std::exp(-0.5 * cum);
}

// Corr(A_iT, A_jT) = rho_ij int_0^T psi_i psi_j / sqrt(int psi_i^2 int psi_j^2).
inline double merton_asset_correlation(const std::function<double(double)>& psi_i,
                                       const std::function<double(double)>& psi_j,
                                       double rho_ij, double maturity,
                                       int panels = 4096) {
    const double cross = integrate_simpson(
        [&](double u) { return psi_i(u) * psi_j(u); }, 0.0, maturity, panels);
    const double ii = integrate_simpson([&](double u) { return psi_i(u) * psi_i(u); },
                                        0.0, maturity, panels);
    const double jj = integrate_simpson([&](double u) { return psi_j(u) * psi_j(u); },
                                        0.0, maturity, panels);
    require_domain(ii > 0.0 && jj > 0.0,
                   "merton_asset_correlation: psi norms must be positive");
    return rho_ij * cross / std::sqrt(ii * jj);
}

// Structural-model inputs: per-name deterministic psi_i on [0,T], default
// thresholds b_bar_iT, and loadings on the common Brownian motion. psi -> beta
// -> psi round trips up to a positive constant.
struct MertonSpec {
    double maturity = 0.0;
    std::vector<std::function<double(double)>> psi;
    std::vector<double> threshold_bar;  // b_bar_iT
    std::vector<double> loading;        // common-factor loadings theta_i
    bool flat_psi = false;              // psi = 1 for every name

    std::size_t size() const { return psi.size(); }

    // psi = 1 for all names: thresholds calibrated so the time-0 default
    // probability marginalizes to 1 - Q0.
    static MertonSpec standard(const std::vector<double>& q0,
                               const std::vector<double>& loading, double maturity) {
        require_shape(q0.size() == loading.size(), "MertonSpec: sizes disagree");
        require_domain(maturity > 0.0, "MertonSpec: maturity must be positive");
        MertonSpec s;
        s.maturity = maturity;
        s.flat_psi = true;
        for (std::size_t i = 0; i < q0.size(); ++i) {
            require_domain(std::fabs(loading[i]) < 1.0, "MertonSpec: |loading| < 1");
            s.psi.push_back([](double) { return 1.0; });
            s.threshold_bar.push_back(std::sqrt(maturity) * norm_ppf_bar(q0[i]));
        }
        s.loading = loading;
        return s;
    }

    double beta(std::size_t i, double t, int panels = 2048) const {
        return merton_beta_from_psi(psi[i], t, maturity, panels);
    }

    void validate(int panels = 2048) const {
        require_shape(threshold_bar.size() == psi.size() &&
                          loading.size() == psi.size(),
                      "MertonSpec: field lengths disagree");
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double mass = integrate_simpson(
                [&](double u) { return psi[i](u) * psi[i](u); }, 0.0, maturity, panels);
            require_domain(mass > 0.0, "MertonSpec: psi must carry positive mass");
            require_domain(std::fabs(loading[i]) < 1.0, "MertonSpec: |loading| < 1");
        }
    }
};

struct MartingaleReport {
    std::vector<double> times;
    std::vector<double> mean;  // sample mean of p_t over paths
    std::vector<double> se;    // standard error of the mean
    double p0 = 0.0;           // unconditional default probability 1 - Q0
    double slope = 0.0;        // OLS slope of mean p_t on t
    double slope_se = 0.0;
    double max_abs_z = 0.0;    // max_t |mean_t - p0| / se_t
};

// Simulates (W_jt, W_t) jointly in the psi = 1 Merton model and evaluates the
// conditional default probability p_{j,t|x = W_T - W_t}. Under the model this
// process is a martingale: its mean stays at 1 - Q0 and the regression slope
// of the time series on t is statistically zero.
inline MartingaleReport check_conditional_martingale(double rho, double q0,
                                                     double maturity,
                                                     const std::vector<double>& grid,
                                                     std::size_t n_paths,
                                                     std::uint64_t seed) {
    require_domain(std::fabs(rho) < 1.0, "check_conditional_martingale: |rho| < 1");
    require_domain(q0 > 0.0 && q0 < 1.0, "check_conditional_martingale: Q0 in (0,1)");
    require_domain(grid.size() >= 2 && grid.front() >= 0.0 &&
                       grid.back() < maturity,
                   "check_conditional_martingale: grid must stay inside [0,T)");

    const double b_bar = std::sqrt(maturity) * norm_ppf_bar(q0);
    const std::size_t steps = grid.size() - 1;
    const CounterRng rng(seed);

    MartingaleReport rep;
    rep.times = grid;
    rep.p0 = 1.0 - q0;
    std::vector<long double> sum(grid.size(), 0.0L), sum2(grid.size(), 0.0L);

    for (std::size_t path = 0; path < n_paths; ++path) {
        // common Brownian path to maturity: grid increments plus the tail
        double w_common = 0.0, w_name = 0.0;
        std::vector<double> wc(grid.size()), wn(grid.size());
        wc[0] = 0.0;
        wn[0] = 0.0;
        for (std::size_t m = 0; m < steps; ++m) {
            const double sdt = std::sqrt(grid[m + 1] - grid[m]);
            const double dc = sdt * rng.normal(path, m, 0);
            const double di = sdt * rng.normal(path, m, 1);
            w_common += dc;
            w_name += rho * dc + std::sqrt(1.0 - rho * rho) * di;
            wc[m + 1] = w_common;
            wn[m + 1] = w_name;
        }
        const double tail_sd = std::sqrt(maturity - grid.back());
        const double w_T = w_common + tail_sd * rng.normal(path, steps, 0);

        for (std::size_t m = 0; m < grid.size(); ++m) {
            const double rem = maturity - grid[m];
            const double p = norm_cdf((b_bar - wn[m] - rho * (w_T - wc[m])) /
                                      (std::sqrt(1.0 - rho * rho) * std::sqrt(rem)));
            sum[m] += p;
            sum2[m] += static_cast<long double>(p) * p;
        }
    }

    rep.mean.resize(grid.size());
    rep.se.resize(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double mu = static_cast<double>(sum[m] / n_paths);
        const double var =
            static_cast<double>(sum2[m] / n_paths) - mu * mu;
        rep.mean[m] = mu;
        rep.se[m] = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_paths));
        if (m > 0 && rep.se[m] > 0.0)
            rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(mu - rep.p0) / rep.se[m]);
    }

    // OLS of mean p_t on t
    double mt = 0.0, mp = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) { mt += grid[m]; mp += rep.mean[m]; }
    mt /= grid.size();
    mp /= grid.size();
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        sxx += (grid[m] - mt) * (grid[m] - mt);
        sxy += (grid[m] - mt) * (rep.mean[m] - mp);
    }
    rep.slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double r = rep.mean[m] - mp - rep.slope * (grid[m] - mt);
        sse += r * r;
    }
    rep.slope_se = grid.size() > 2
                       ? std::sqrt(sse / (grid.size() - 2) / sxx)
                       : 0.0;
    // guard against a deceptively small regression s.e. when residuals vanish:
    // the Monte Carlo noise floor is the per-time standard error
    double se_floor = 0.0;
    for (std::size_t m = 1; m < grid.size(); ++m) se_floor = std::max(se_floor, rep.se[m]);
    rep.slope_se = std::max(rep.slope_se, se_floor / (grid.back() - grid.front()));
    return rep;
}

// Same check from a structural spec; the closed conditional-probability form
// needs the flat-psi model.
inline MartingaleReport check_conditional_martingale(const MertonSpec& spec,
                                                     std::size_t name,
                                                     const std::vector<double>& grid,
                                                     std::size_t n_paths,
                                                     std::uint64_t seed) {
    require_domain(spec.flat_psi,
                   "check_conditional_martingale: the closed conditional form needs "
                   "the flat-psi structural model");
    require_domain(name < spec.size(), "check_conditional_martingale: bad name index");
    const double q0 =
        1.0 - norm_cdf(spec.threshold_bar[name] / std::sqrt(spec.maturity));
    return check_conditional_martingale(spec.loading[name], q0, spec.maturity, grid,
                                        n_paths, seed);
}

} // namespace becor
