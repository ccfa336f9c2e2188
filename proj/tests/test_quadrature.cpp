#include <catch2/catch.hpp>

#include <cmath>

#include "becor/math/normal.hpp"
#include "becor/math/quadrature.hpp"

#include "oracles.hpp"

using namespace becor;

TEST_CASE("gauss-hermite moments") {
    const auto rule = gauss_hermite(kDefaultHermiteNodes);
    CHECK(integrate_gaussian([](double) { return 1.0; }, rule) == Approx(1.0).margin(1e-13));
    CHECK(integrate_gaussian([](double x) { return x * x; }, rule) == Approx(1.0).margin(1e-12));
    CHECK(integrate_gaussian([](double x) { return x; }, rule) == Approx(0.0).margin(1e-13));
    // exact for polynomials up to degree 2n-1: E[x^6] = 15
    CHECK(integrate_gaussian([](double x) { return std::pow(x, 6); }, rule) ==
          Approx(15.0).epsilon(1e-12));
    for (double w : rule.weights) CHECK(w > 0.0);
    for (std::size_t i = 1; i < rule.nodes.size(); ++i)
        CHECK(rule.nodes[i] > rule.nodes[i - 1]);
}

TEST_CASE("gauss-hermite total-probability integrand") {
    const auto rule = gauss_hermite(kDefaultHermiteNodes);
    const double sbar = norm_ppf_bar(0.9);
    const double v = integrate_gaussian(
        [&](double x) { return norm_cdf((sbar - 0.5 * x) / std::sqrt(0.75)); }, rule);
    CHECK(v == Approx(0.1).margin(1e-8));
}

TEST_CASE("tensor hermite") {
    const auto rule = tensor_hermite(kDefaultTensorNodes, 2);
    CHECK(integrate_gaussian_p([](const std::vector<double>&) { return 1.0; }, rule) ==
          Approx(1.0).margin(1e-12));
    CHECK(integrate_gaussian_p([](const std::vector<double>& x) { return x[0] * x[1]; },
                               rule) == Approx(0.0).margin(1e-12));
    // law of total probability with a 2-factor loading
    const double sbar = norm_ppf_bar(0.85);
    const double den = std::sqrt(1.0 - 0.16 - 0.09);
    const double v = integrate_gaussian_p(
        [&](const std::vector<double>& x) {
            return norm_cdf((sbar - 0.4 * x[0] - 0.3 * x[1]) / den);
        },
        rule);
    CHECK(v == Approx(0.15).margin(1e-8));
    CHECK_THROWS_AS(tensor_hermite(8, 4), DomainError);
}

TEST_CASE("gauss-laguerre against the Gamma density") {
    const double theta = 0.5;
    const auto rule = gauss_laguerre(kDefaultLaguerreNodes, 1.0 / theta);
    CHECK(integrate_gamma([](double) { return 1.0; }, rule) == Approx(1.0).margin(1e-12));
    // Gamma(2,1) mean = shape = 1/theta
    CHECK(integrate_gamma([](double x) { return x; }, rule) == Approx(2.0).margin(1e-10));
    // Laplace transform identity: s = (1-Q)^{-theta} - 1 gives back 1-Q
    const double q = 0.9;
    const double s = std::pow(1.0 - q, -theta) - 1.0;
    CHECK(integrate_gamma([&](double x) { return std::exp(-s * x); }, rule) ==
          Approx(1.0 - q).margin(1e-8));
    for (double w : rule.weights) CHECK(w > 0.0);
    CHECK_THROWS_AS(gauss_laguerre(64, 0.0), DomainError);
}

TEST_CASE("identity-grade rules reach 1e-8 at the documented extremes") {
    // |rho| <= 0.99, Q in [1e-4, 1-1e-4]
    const auto fine = gauss_hermite(kIdentityHermiteNodes);
    double worst = 0.0;
    for (double q : {1e-4, 0.05, 0.5, 0.95, 1.0 - 1e-4}) {
        for (double rho : {0.0, 0.6, 0.9, 0.99}) {
            const double sbar = norm_ppf_bar(q);
            const double v = integrate_gaussian(
                [&](double x) {
                    return norm_cdf((sbar - rho * x) / std::sqrt(1.0 - rho * rho));
                },
                fine);
            worst = std::max(worst, std::fabs(v - (1.0 - q)));
        }
    }
    CHECK(worst < 1e-8);

    // Clayton: conditional rates s <= 100
    const auto fine_gl = gauss_laguerre(kIdentityLaguerreNodes, 1.0 / 1.0);
    for (double s : {1.0, 10.0, 100.0}) {
        const double v =
            integrate_gamma([&](double x) { return std::exp(-s * x); }, fine_gl);
        CHECK(v == Approx(1.0 / (1.0 + s)).margin(1e-8));
    }
}

TEST_CASE("doubling nodes moves smooth results less than the halving gap") {
    // report |I_n - I_{n/2}| as the error estimate; doubling must stay inside it
    for (double rho : {0.3, 0.7}) {
        for (double q : {0.2, 0.8}) {
            const double sbar = norm_ppf_bar(q);
            auto f = [&](double x) {
                return norm_cdf((sbar - rho * x) / std::sqrt(1.0 - rho * rho));
            };
            const double i_half = integrate_gaussian(f, gauss_hermite(32));
            const double i_full = integrate_gaussian(f, gauss_hermite(64));
            const double i_double = integrate_gaussian(f, gauss_hermite(128));
            const double estimate = std::max(std::fabs(i_full - i_half),
                                             quadrature_error_floor(i_full));
            CHECK(std::fabs(i_double - i_full) <= estimate);
        }
    }
}

TEST_CASE("laplace transform at both rate conventions") {
    // s built from the survival probability recovers Q; s built from the
    // default probability recovers 1-Q
    const double theta = 0.5, q = 0.9;
    const auto rule = gauss_laguerre(kDefaultLaguerreNodes, 1.0 / theta);
    const double s_default = std::pow(1.0 - q, -theta) - 1.0;
    CHECK(integrate_gamma([&](double x) { return std::exp(-s_default * x); }, rule) ==
          Approx(1.0 - q).margin(1e-8));
    const double s_survival = std::pow(q, -theta) - 1.0;
    CHECK(integrate_gamma([&](double x) { return std::exp(-s_survival * x); }, rule) ==
          Approx(q).margin(1e-8));
}
