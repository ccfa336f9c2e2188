#pragma once

// Break-even correlation solvers and the break-even correlation matrix
// Sigma~ = [rho_ij 2 sb_i sb_j / (sb_i^2 + sb_j^2)] with its factor
// decomposition.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "becor/drift/drift.hpp"
#include "becor/errors.hpp"
#include "becor/math/linalg.hpp"
#include "becor/math/rootfind.hpp"

namespace becor {

// Root of the FpTD drift as a function of the flat pricing correlation rho^2.
// Bracket [1e-6, 0.990] (|rho| capped at 0.995 in solvers), bisection with
// secant acceleration, |drift| < 1e-10 at the root, 1e-8 on rho^2. Existence
// is not guaranteed: same sign at both ends returns a structured no-solution.
inline BreakevenResult solve_breakeven_flat(int p, const MarketState& market,
                                            const std::vector<double>& betas,
                                            const Eigen::MatrixXd& spread_corr,
                                            PricerOptions opt = {}) {
    const std::size_t n = market.size();
    auto objective = [&](double rho2) {
        return drift_fptd(p, market, CopulaSpec::gauss_flat(n, std::sqrt(rho2)), betas,
                          spread_corr, opt)
            .total;
    };
    const RootResult r = find_root_bracketed(objective, 1e-6,
                                             kSolverLoadingCap * kSolverLoadingCap,
                                             1e-10, 1e-8, 80);
    BreakevenResult out;
    out.found = r.found;
    out.rho2 = r.root;
    out.drift_at_root = r.f_at_root;
    out.drift_lo = r.f_lo;
    out.drift_hi = r.f_hi;
    out.iterations = r.iterations;
    out.message = r.message;
    return out;
}

// Drift report at the current market with the solved break-even attached.
inline DriftReport drift_fptd_report(int p, const MarketState& market,
                                     const CopulaSpec& copula,
                                     const std::vector<double>& betas,
                                     const Eigen::MatrixXd& spread_corr,
                                     PricerOptions opt = {}) {
    DriftReport rep = drift_fptd(p, market, copula, betas, spread_corr, opt);
    rep.breakeven = solve_breakeven_flat(p, market, betas, spread_corr, opt);
    return rep;
}

// Closed form for homogeneous-Q baskets (the A*_ij weights cancel):
// rho_BE^2 = 2 sum_{i<j} b_i b_j rho_ij / sum_{i<j} (b_i^2 + b_j^2).
// The caller is responsible for the equal-Q premise; with two names the
// formula is exact for any Q.
inline double breakeven_weighted_closed_form(const std::vector<double>& betas,
                                             const Eigen::MatrixXd& spread_corr) {
    const std::size_t n = betas.size();
    require_shape(spread_corr.rows() == static_cast<Eigen::Index>(n) &&
                      spread_corr.cols() == static_cast<Eigen::Index>(n),
                  "breakeven_weighted_closed_form: sizes disagree");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            num += betas[i] * betas[j] * spread_corr(i, j);
            den += betas[i] * betas[i] + betas[j] * betas[j];
        }
    }
    require_domain(den > 0.0,
                   "breakeven_weighted_closed_form: all betas are zero, the "
                   "break-even correlation is undefined");
    return 2.0 * num / den;
}

// ---------------------------------------------------------------------------

struct BreakevenMatrix {
    Eigen::MatrixXd sigma_tilde;
    std::optional<Eigen::MatrixXd> factor_loadings;  // n x p, off-diagonal fit
    int rank_detected = 0;   // eigenvalues above 1e-10 * lambda_max
    double residual = 0.0;   // max off-diagonal |sigma_tilde - L L^T|
};

namespace detail {

// Iterated principal-factor decomposition: fit L (n x p) so that the
// off-diagonal of L L^T matches the target correlation matrix. The diagonal
// plays no role in the factor structure (communalities |rho_i|^2 < 1), so it
// is replaced by the current communalities and refined.
inline Eigen::MatrixXd principal_factors(const Eigen::MatrixXd& corr, int p,
                                         double& residual) {
    const Eigen::Index n = corr.rows();
    Eigen::VectorXd h2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double m = 0.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) m = std::max(m, std::fabs(corr(i, j)));
        h2(i) = std::min(m, 1.0 - 1e-12);
    }
    Eigen::MatrixXd loadings(n, p);
    for (int iter = 0; iter < 1000; ++iter) {
        Eigen::MatrixXd work = corr;
        work.diagonal() = h2;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(work);
        // top-p eigenpairs (Eigen sorts ascending)
        for (int k = 0; k < p; ++k) {
            const Eigen::Index idx = n - 1 - k;
            const double lam = std::max(es.eigenvalues()(idx), 0.0);
            loadings.col(k) = es.eigenvectors().col(idx) * std::sqrt(lam);
        }
        Eigen::VectorXd h2_new = loadings.rowwise().squaredNorm();
        for (Eigen::Index i = 0; i < n; ++i) h2_new(i) = std::min(h2_new(i), 1.0 - 1e-12);
        const double step = (h2_new - h2).cwiseAbs().maxCoeff();
        h2 = h2_new;
        if (step < 1e-14) break;
    }
    // sign convention: largest-magnitude entry of each column positive
    for (int k = 0; k < p; ++k) {
        Eigen::Index imax = 0;
        loadings.col(k).cwiseAbs().maxCoeff(&imax);
        if (loadings(imax, k) < 0.0) loadings.col(k) = -loadings.col(k);
    }
    residual = 0.0;
    const Eigen::MatrixXd fit = loadings * loadings.transpose();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) residual = std::max(residual, std::fabs(corr(i, j) - fit(i, j)));
    return loadings;
}

} // namespace detail

// Sigma~ is a correlation matrix whenever Sigma^S is one (it equals the
// asset-value correlation of the matched structural model), so a PSD failure
// beyond tolerance flags inconsistent inputs rather than round-off.
inline BreakevenMatrix build_breakeven_matrix(const std::vector<double>& sigma_bar,
                                              const Eigen::MatrixXd& spread_corr,
                                              std::optional<int> target_rank = {}) {
    const std::size_t n = sigma_bar.size();
    require_shape(spread_corr.rows() == static_cast<Eigen::Index>(n) &&
                      spread_corr.cols() == static_cast<Eigen::Index>(n),
                  "build_breakeven_matrix: sizes disagree");
    for (double s : sigma_bar)
        require_domain(s > 0.0, "build_breakeven_matrix: sigma_bar must be > 0");
    {
        const auto diag = validate_correlation_matrix(spread_corr);
        require_domain(diag.accepted,
                       "build_breakeven_matrix: spread correlation matrix rejected");
    }

    BreakevenMatrix out;
    out.sigma_tilde.resize(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                out.sigma_tilde(i, j) = 1.0;
            } else {
                const double f = 2.0 * sigma_bar[i] * sigma_bar[j] /
                                 (sigma_bar[i] * sigma_bar[i] + sigma_bar[j] * sigma_bar[j]);
                out.sigma_tilde(i, j) = spread_corr(i, j) * f;
            }
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.sigma_tilde,
                                                      Eigen::EigenvaluesOnly);
    const double lam_max = es.eigenvalues().maxCoeff();
    const double lam_min = es.eigenvalues().minCoeff();
    if (lam_min < kPsdEigTolerance * std::max(1.0, lam_max))
        throw NumericError("build_breakeven_matrix: sigma_tilde failed the PSD check; "
                           "the input spread correlations are inconsistent");
    out.rank_detected = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > 1e-10 * lam_max) ++out.rank_detected;

    if (target_rank) {
        require_domain(*target_rank >= 1 && *target_rank <= static_cast<int>(n),
                       "build_breakeven_matrix: target rank must lie in 1..n");
        double residual = 0.0;
        Eigen::MatrixXd loadings =
            detail::principal_factors(out.sigma_tilde, *target_rank, residual);
        for (Eigen::Index i = 0; i < loadings.rows(); ++i)
            require_domain(loadings.row(i).norm() < 1.0,
                           "build_breakeven_matrix: factor loadings must satisfy "
                           "|rho_i| < 1");
        out.factor_loadings = std::move(loadings);
        out.residual = residual;
    }
    return out;
}

} // namespace becor
