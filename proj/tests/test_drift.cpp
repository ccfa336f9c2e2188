#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "becor/drift/drift.hpp"

#include "oracles.hpp"

using namespace becor;

namespace {

Eigen::MatrixXd flat_corr(int n, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
    m.diagonal().setOnes();
    return m;
}

Eigen::MatrixXd one_factor_corr(const std::vector<double>& l) {
    const int n = static_cast<int>(l.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = i == j ? 1.0 : l[i] * l[j];
    return m;
}

} // namespace

TEST_CASE("drift vanishes without volatility") {
    auto market = make_market({0.9, 0.8, 0.85}, 0.3, 5.0);
    const auto payoff = BasketPayoff::fptd(3, 1, 0.3);
    const auto rep = drift_gauss(payoff, market, CopulaSpec::gauss_flat(3, 0.4),
                                 {0.0, 0.0, 0.0}, flat_corr(3, 0.5));
    CHECK(rep.total == Approx(0.0).margin(1e-15));
    CHECK(rep.eta == 0.0);
}

TEST_CASE("matched dynamics cancel every pairwise bracket") {
    // equal betas, rho_ij = rho_i rho_j: the replication condition holds
    const std::vector<double> load = {0.3, 0.5, 0.7, 0.4};
    auto market = make_market({0.9, 0.8, 0.85, 0.75}, 0.3, 5.0);
    const auto payoff = BasketPayoff::fptd(4, 2, 0.3);
    const auto rep = drift_gauss(payoff, market, CopulaSpec::gauss_1f(load),
                                 std::vector<double>(4, 0.8), one_factor_corr(load));
    CHECK(rep.total == Approx(0.0).margin(1e-10));
    for (const auto& [ij, v] : rep.pair_terms) CHECK(v == Approx(0.0).margin(1e-12));
}

TEST_CASE("weighted replication condition cancels heterogeneous betas") {
    // rho_ij = rho_i rho_j (beta_i^2 + beta_j^2) / (2 beta_i beta_j)
    const std::vector<double> load = {0.3, 0.4, 0.35};
    const std::vector<double> beta = {0.6, 1.1, 0.9};
    Eigen::MatrixXd corr(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            corr(i, j) = i == j ? 1.0
                                : load[i] * load[j] *
                                      (beta[i] * beta[i] + beta[j] * beta[j]) /
                                      (2.0 * beta[i] * beta[j]);
    auto market = make_market({0.92, 0.8, 0.87}, 0.0, 5.0);
    const auto rep = drift_gauss(BasketPayoff::fptd(3, 1, 0.0), market,
                                 CopulaSpec::gauss_1f(load), beta, corr);
    CHECK(rep.total == Approx(0.0).margin(1e-10));
}

TEST_CASE("FTD drift signs at the flat-correlation endpoints") {
    // at rho = 0 the drift is negative; at rho = rho_S it is positive
    auto market = make_market({0.9, 0.85, 0.8, 0.95}, 0.4, 5.0);
    const std::vector<double> beta = {0.5, 0.9, 0.7, 1.2};
    const double rho_s2 = 0.4;
    const auto corr = flat_corr(4, rho_s2);
    const auto at_zero = drift_fptd(1, market, CopulaSpec::gauss_flat(4, 0.0), beta, corr);
    CHECK(at_zero.total < 0.0);
    const auto at_rho_s =
        drift_fptd(1, market, CopulaSpec::gauss_flat(4, std::sqrt(rho_s2)), beta, corr);
    CHECK(at_rho_s.total > 0.0);
    // two-name FTD with pricing rho = 0 and positive spread correlation
    auto m2 = make_market({0.9, 0.8}, 0.0, 5.0);
    const auto neg = drift_fptd(1, m2, CopulaSpec::gauss_flat(2, 0.0), {0.8, 0.8},
                                flat_corr(2, 0.5));
    CHECK(neg.total < 0.0);
}

TEST_CASE("counting weights equal the generic pairwise drift") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> uq(0.6, 0.98), ub(0.3, 1.5), ur(0.0, 0.8);
    for (int n = 2; n <= 8; ++n) {
        std::vector<double> q(n), beta(n);
        for (auto& v : q) v = uq(gen);
        for (auto& v : beta) v = ub(gen);
        auto market = make_market(q, 0.35, 5.0);
        const auto corr = flat_corr(n, ur(gen));
        const auto copula = CopulaSpec::gauss_flat(n, 0.55);
        for (int p = 1; p <= n; ++p) {
            const auto via_counting = drift_fptd(p, market, copula, beta, corr);
            const auto via_pairwise = drift_gauss(BasketPayoff::fptd(n, p, 0.35), market,
                                                  copula, beta, corr);
            CHECK(via_counting.total == Approx(via_pairwise.total).margin(1e-9));
            for (const auto& [ij, v] : via_counting.pair_terms)
                CHECK(v == Approx(via_pairwise.pair_terms.at(ij)).margin(1e-9));
        }
    }
}

TEST_CASE("two-name FpTD drift uses the empty product") {
    auto market = make_market({0.9, 0.8}, 0.0, 5.0);
    const auto copula = CopulaSpec::gauss_flat(2, 0.4);
    const std::vector<double> beta = {1.0, 1.0};
    const auto corr = flat_corr(2, 0.3);
    const auto rep = drift_fptd(1, market, copula, beta, corr);
    // A*_12 for p=1 with no other names is the plain phi(d1) phi(d2) integral
    const auto rule = gauss_hermite(kDefaultHermiteNodes);
    const double sbar1 = norm_ppf_bar(0.9), sbar2 = norm_ppf_bar(0.8);
    const double den = std::sqrt(1.0 - 0.16);
    double a12 = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double x = rule.nodes[k];
        a12 += rule.weights[k] * norm_pdf((sbar1 - 0.4 * x) / den) *
               norm_pdf((sbar2 - 0.4 * x) / den) / (den * den);
    }
    const double bracket = 0.16 * 2.0 - 2.0 * 0.3;
    CHECK(rep.total == Approx(0.5 * bracket * a12).margin(1e-12));
}

TEST_CASE("p-factor drift with p = 1 equals the one-factor drift") {
    const std::vector<double> load = {0.3, 0.5, 0.6};
    Eigen::MatrixXd l(3, 1);
    for (int i = 0; i < 3; ++i) l(i, 0) = load[i];
    auto market = make_market({0.9, 0.8, 0.7}, 0.2, 5.0);
    const std::vector<double> beta = {0.7, 1.0, 0.4};
    const auto corr = flat_corr(3, 0.45);
    const auto payoff = BasketPayoff::fptd(3, 2, 0.2);
    const auto via_pf = drift_gauss(payoff, market, CopulaSpec::gauss_pf(l), beta, corr);
    const auto via_1f = drift_gauss(payoff, market, CopulaSpec::gauss_1f(load), beta, corr);
    CHECK(via_pf.total == via_1f.total);  // identical code path, bit-for-bit
    const auto fptd_pf = drift_fptd(2, market, CopulaSpec::gauss_pf(l), beta, corr);
    const auto fptd_1f = drift_fptd(2, market, CopulaSpec::gauss_1f(load), beta, corr);
    CHECK(fptd_pf.total == fptd_1f.total);
}

TEST_CASE("two-factor drift embeds the one-factor model") {
    // loadings (rho_i, 0) under the tensor rule agree with the 1F evaluation
    const std::vector<double> load = {0.35, 0.55, 0.25};
    Eigen::MatrixXd l(3, 2);
    for (int i = 0; i < 3; ++i) { l(i, 0) = load[i]; l(i, 1) = 0.0; }
    auto market = make_market({0.88, 0.78, 0.93}, 0.0, 5.0);
    const std::vector<double> beta = {0.9, 0.6, 1.1};
    const auto corr = flat_corr(3, 0.35);
    const auto payoff = BasketPayoff::fptd(3, 1, 0.0);
    const auto via_2f = drift_gauss(payoff, market, CopulaSpec::gauss_pf(l), beta, corr);
    const auto via_1f = drift_gauss(payoff, market, CopulaSpec::gauss_1f(load), beta, corr);
    CHECK(via_2f.total == Approx(via_1f.total).margin(1e-10));
}

TEST_CASE("drift_general with the Gaussian kernel matches drift_gauss") {
    const std::vector<double> load = {0.4, 0.6, 0.2, 0.5};
    std::vector<double> q = {0.9, 0.75, 0.85, 0.95};
    auto market = make_market(q, 0.3, 5.0);
    const std::vector<double> beta = {0.8, 1.2, 0.5, 0.9};
    std::vector<double> vols(4);
    for (int i = 0; i < 4; ++i) vols[i] = sigma_from_beta(beta[i], q[i]);
    Eigen::MatrixXd corr = flat_corr(4, 0.3);
    const auto copula = CopulaSpec::gauss_1f(load);
    const auto kernel = make_gauss1f_kernel(copula);
    for (int p : {1, 2, 3}) {
        const auto payoff = BasketPayoff::fptd(4, p, 0.3);
        const auto general = drift_general(payoff, market, kernel, vols, corr);
        const auto gauss = drift_gauss(payoff, market, copula, beta, corr);
        CHECK(general.total == Approx(gauss.total).margin(1e-9));
        CHECK(general.eta == 0.0);
        CHECK_FALSE(general.numeric_chi_fallback);
    }
    // a non-FpTD payoff through the same identity
    const auto payoff = BasketPayoff::generic(4, [](const std::vector<int>& d) {
        return 0.4 * d[0] + d[1] * d[2] * (1.0 - 0.3 * d[3]);
    });
    const auto general = drift_general(payoff, market, kernel, vols, corr);
    const auto gauss = drift_gauss(payoff, market, copula, beta, corr);
    CHECK(general.total == Approx(gauss.total).margin(1e-9));
}

TEST_CASE("drift_general with the Clayton kernel under matched dynamics") {
    // martingale-consistent volatilities and correlations kill the drift for
    // any payoff
    const double theta = 0.8, sigma0 = 0.6;
    std::vector<double> q = {0.9, 0.8, 0.85};
    auto market = make_market(q, 0.0, 5.0);
    auto beta_c = [&](double qq) { return std::sqrt(1.0 - std::pow(1.0 - qq, theta)); };
    std::vector<double> vols(3);
    for (int i = 0; i < 3; ++i) vols[i] = sigma0 * (1.0 - q[i]) * beta_c(q[i]);
    Eigen::MatrixXd corr(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            corr(i, j) = i == j ? 1.0 : beta_c(q[i]) * beta_c(q[j]);
    const auto kernel = make_clayton_kernel(theta, 3);
    for (int p : {1, 2}) {
        const auto rep = drift_general(BasketPayoff::fptd(3, p, 0.0), market, kernel,
                                       vols, corr);
        CHECK(rep.total == Approx(0.0).margin(1e-12));
    }
    // off the matched correlations the drift is nonzero
    const auto off = drift_general(BasketPayoff::fptd(3, 1, 0.0), market, kernel, vols,
                                   flat_corr(3, 0.0));
    CHECK(std::fabs(off.total) > 1e-8);
}

TEST_CASE("numeric-chi fallback tracks the closed form") {
    const double theta = 0.9;
    // Clayton expressed as a generic Archimedean model: xi is the Gamma
    // Laplace transform (1+s)^{-1/theta}
    auto xi = [theta](double s) { return std::pow(1.0 + s, -1.0 / theta); };
    auto xi_inv = [theta](double u) { return std::pow(u, -theta) - 1.0; };
    auto density = [theta](double x) { return gamma_density(x, 1.0 / theta); };
    const auto generic = make_archimedean_kernel(xi, xi_inv, density, 2);
    const auto closed = make_clayton_kernel(theta, 2);
    auto market = make_market({0.88, 0.8}, 0.0, 5.0);
    const std::vector<double> vols = {0.02, 0.03};
    const auto corr = flat_corr(2, 0.4);
    const auto payoff = BasketPayoff::fptd(2, 1, 0.0);
    const auto a = drift_general(payoff, market, generic, vols, corr,
                                 {.grid_points = 3001, .x_hi = 40.0});
    const auto b = drift_general(payoff, market, closed, vols, corr);
    CHECK(a.numeric_chi_fallback);
    CHECK_FALSE(b.numeric_chi_fallback);
    // fallback-grade agreement: the trapezoid struggles near the Gamma
    // density origin, so the tolerance is widened to 1% relative
    CHECK(a.total == Approx(b.total).epsilon(1e-2).margin(1e-10));
}

TEST_CASE("drift scales quadratically in the betas") {
    auto market = make_market({0.9, 0.8, 0.85}, 0.3, 5.0);
    const auto copula = CopulaSpec::gauss_flat(3, 0.5);
    const std::vector<double> beta = {0.7, 1.1, 0.9};
    std::vector<double> scaled(3);
    for (int i = 0; i < 3; ++i) scaled[i] = 3.0 * beta[i];
    const auto corr = flat_corr(3, 0.25);
    const auto base = drift_fptd(2, market, copula, beta, corr);
    const auto big = drift_fptd(2, market, copula, scaled, corr);
    CHECK(big.total == Approx(9.0 * base.total).epsilon(1e-12));
}

TEST_CASE("replication PDE residual") {
    const auto q_grid = std::vector<double>{0.15, 0.35, 0.55, 0.75, 0.92};
    SECTION("Gaussian kernel with matched dynamics") {
        const std::vector<double> load = {0.45, 0.65};
        const auto kernel = make_gauss1f_kernel(CopulaSpec::gauss_1f(load));
        const double beta = 0.8;
        auto sigma = [beta](std::size_t, double q) { return sigma_from_beta(beta, q); };
        auto rho = [&load](std::size_t i, std::size_t j, double, double) {
            return load[i] * load[j];
        };
        const auto x_grid = linspace(-4.0, 4.0, 41);
        CHECK(check_replication_pde(kernel, sigma, rho, q_grid, x_grid) < 1e-10);
    }
    SECTION("Clayton kernel with martingale-consistent volatilities") {
        const double theta = 0.7, sigma0 = 0.5;
        const auto kernel = make_clayton_kernel(theta, 2);
        auto beta_c = [theta](double q) {
            return std::sqrt(1.0 - std::pow(1.0 - q, theta));
        };
        auto sigma = [&](std::size_t, double q) {
            return sigma0 * (1.0 - q) * beta_c(q);
        };
        auto rho = [&](std::size_t, std::size_t, double qi, double qj) {
            return beta_c(qi) * beta_c(qj);
        };
        const auto x_grid = linspace(0.05, 12.0, 60);
        CHECK(check_replication_pde(kernel, sigma, rho, q_grid, x_grid) < 1e-8);
    }
    SECTION("generic Archimedean with constant correlations cannot replicate") {
        const double theta = 0.7, sigma0 = 0.5;
        auto xi = [theta](double s) { return std::pow(1.0 + s, -1.0 / theta); };
        auto xi_inv = [theta](double u) { return std::pow(u, -theta) - 1.0; };
        auto density = [theta](double x) { return gamma_density(x, 1.0 / theta); };
        const auto kernel = make_archimedean_kernel(xi, xi_inv, density, 2);
        auto beta_c = [theta](double q) {
            return std::sqrt(1.0 - std::pow(1.0 - q, theta));
        };
        auto sigma = [&](std::size_t, double q) {
            return sigma0 * (1.0 - q) * beta_c(q);
        };
        auto rho = [](std::size_t, std::size_t, double, double) { return 0.5; };
        const auto x_grid = linspace(0.05, 8.0, 25);
        CHECK(check_replication_pde(kernel, sigma, rho, q_grid, x_grid) > 1e-5);
    }
}

TEST_CASE("the full-basket order is linear and carries no drift") {
    // psi_n = sum delta_i (1-R): a portfolio of single-name digitals; every
    // pairwise second difference vanishes, so the hedging error is zero for
    // any correlation mismatch
    auto market = make_market({0.9, 0.8, 0.85}, 0.2, 5.0);
    const auto rep = drift_fptd(3, market, CopulaSpec::gauss_flat(3, 0.6),
                                {1.0, 0.7, 1.3}, flat_corr(3, 0.4));
    CHECK(rep.total == 0.0);
    const auto gen = drift_gauss(BasketPayoff::fptd(3, 3, 0.2), market,
                                 CopulaSpec::gauss_flat(3, 0.6), {1.0, 0.7, 1.3},
                                 flat_corr(3, 0.4));
    CHECK(gen.total == Approx(0.0).margin(1e-12));
}
