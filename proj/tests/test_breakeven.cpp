#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "becor/drift/breakeven.hpp"

#include "oracles.hpp"

using namespace becor;

namespace {

Eigen::MatrixXd flat_corr(int n, double rho) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(n, n, rho);
    m.diagonal().setOnes();
    return m;
}

// random correlation matrix from a normalized Gram factor
Eigen::MatrixXd random_corr(int n, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd a(n, n + 2);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n + 2; ++j) a(i, j) = nd(gen);
    for (int i = 0; i < n; ++i) a.row(i).normalize();
    return a * a.transpose();
}

} // namespace

TEST_CASE("two-name break-even identities") {
    auto market = make_market({0.9, 0.8}, 0.0, 5.0);  // unequal Q on purpose
    SECTION("equal betas recover the spread correlation") {
        const auto r = solve_breakeven_flat(1, market, {1.0, 1.0}, flat_corr(2, 0.3));
        REQUIRE(r.found);
        CHECK(r.rho2 == Approx(0.3).margin(1e-7));
        CHECK(std::fabs(r.drift_at_root) < 1e-10);
    }
    SECTION("closed form with unequal betas") {
        CHECK(breakeven_weighted_closed_form({1.0, 2.0}, flat_corr(2, 0.5)) ==
              Approx(0.4).margin(1e-14));
        const auto r = solve_breakeven_flat(1, market, {1.0, 2.0}, flat_corr(2, 0.5));
        REQUIRE(r.found);
        CHECK(r.rho2 == Approx(0.4).margin(1e-7));  // A*_12 cancels for n = 2
    }
}

TEST_CASE("closed-form weighted break-even") {
    SECTION("uniform correlations pass through") {
        CHECK(breakeven_weighted_closed_form({0.7, 0.7, 0.7}, flat_corr(3, 0.45)) ==
              Approx(0.45).margin(1e-14));
    }
    SECTION("four names, two blocks") {
        Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
        corr(0, 1) = corr(1, 0) = 0.3;
        corr(2, 3) = corr(3, 2) = 0.7;
        CHECK(breakeven_weighted_closed_form(std::vector<double>(4, 1.0), corr) ==
              Approx(1.0 / 6.0).margin(1e-14));
    }
    SECTION("all-zero betas rejected") {
        CHECK_THROWS_AS(breakeven_weighted_closed_form({0.0, 0.0}, flat_corr(2, 0.5)),
                        DomainError);
    }
}

TEST_CASE("homogeneous baskets collapse the solver to the closed form") {
    const int n = 5;
    auto market = make_market(std::vector<double>(n, 0.85), 0.0, 5.0);
    SECTION("uniform spread correlation is the exact root") {
        const auto r = solve_breakeven_flat(2, market, std::vector<double>(n, 0.9),
                                            flat_corr(n, 0.4));
        REQUIRE(r.found);
        CHECK(r.rho2 == Approx(0.4).margin(1e-7));
    }
    SECTION("the two-block four-name case lands on one sixth") {
        auto m4 = make_market(std::vector<double>(4, 0.85), 0.0, 5.0);
        Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
        corr(0, 1) = corr(1, 0) = 0.3;
        corr(2, 3) = corr(3, 2) = 0.7;
        for (int p : {1, 2, 3}) {
            const auto r = solve_breakeven_flat(p, m4, std::vector<double>(4, 1.0), corr);
            REQUIRE(r.found);
            CHECK(r.rho2 == Approx(1.0 / 6.0).margin(5e-4));
        }
    }
    SECTION("heterogeneous Q matches the solver only through equal A-weights") {
        // sanity: closed form and solver diverge once Q differ
        auto mh = make_market({0.95, 0.7, 0.85, 0.9}, 0.0, 5.0);
        Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(4, 4);
        corr(0, 1) = corr(1, 0) = 0.3;
        corr(2, 3) = corr(3, 2) = 0.7;
        const auto r = solve_breakeven_flat(1, mh, std::vector<double>(4, 1.0), corr);
        REQUIRE(r.found);
        CHECK(std::fabs(r.rho2 - 1.0 / 6.0) > 1e-3);
    }
}

TEST_CASE("break-even root is invariant under uniform beta scaling") {
    auto market = make_market({0.9, 0.8, 0.88, 0.95}, 0.0, 5.0);
    const std::vector<double> beta = {0.6, 1.0, 0.8, 1.3};
    std::vector<double> scaled(4);
    for (int i = 0; i < 4; ++i) scaled[i] = 0.37 * beta[i];
    const auto corr = flat_corr(4, 0.5);
    const auto a = solve_breakeven_flat(2, market, beta, corr);
    const auto b = solve_breakeven_flat(2, market, scaled, corr);
    REQUIRE(a.found);
    REQUIRE(b.found);
    CHECK(a.rho2 == Approx(b.rho2).margin(1e-7));
}

TEST_CASE("no-solution brackets are reported, not extrapolated") {
    auto market = make_market({0.9, 0.8}, 0.0, 5.0);
    // negative spread correlation keeps the drift positive over the bracket
    const auto r = solve_breakeven_flat(1, market, {1.0, 1.0}, flat_corr(2, -0.4));
    CHECK_FALSE(r.found);
    CHECK(r.drift_lo > 0.0);
    CHECK(r.drift_hi > 0.0);
    CHECK_FALSE(r.message.empty());
}

TEST_CASE("FpTD break-even lies strictly inside (0, rho_S^2)") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> uq(0.5, 0.99), ub(0.2, 2.0), ur(0.05, 0.9);
    std::uniform_int_distribution<int> un(2, 10);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = un(gen);
        std::vector<double> q(n), beta(n);
        for (auto& v : q) v = uq(gen);
        for (auto& v : beta) v = ub(gen);
        const double rho_s2 = ur(gen);
        auto market = make_market(q, 0.0, 5.0);
        std::uniform_int_distribution<int> up(1, n);
        const int p = up(gen);
        const auto r = solve_breakeven_flat(p, market, beta, flat_corr(n, rho_s2),
                                            {.n_nodes = 48});
        REQUIRE(r.found);
        CHECK(r.rho2 > 0.0);
        CHECK(r.rho2 < rho_s2);
    }
}

TEST_CASE("break-even matrix construction") {
    SECTION("equal sigmas leave the spread correlations untouched") {
        auto corr = flat_corr(3, 0.35);
        const auto bm = build_breakeven_matrix({0.5, 0.5, 0.5}, corr);
        CHECK((bm.sigma_tilde - corr).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("the 2 s_i s_j / (s_i^2 + s_j^2) factor") {
        const auto bm = build_breakeven_matrix({1.0, 2.0}, flat_corr(2, 1.0));
        CHECK(bm.sigma_tilde(0, 1) == Approx(0.8).margin(1e-14));
        CHECK(bm.sigma_tilde(0, 0) == 1.0);
    }
    SECTION("construct-then-decompose recovers one-factor loadings") {
        const std::vector<double> l = {0.9, 0.5, 0.3, -0.8, 0.6};
        Eigen::MatrixXd corr(5, 5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) corr(i, j) = i == j ? 1.0 : l[i] * l[j];
        const auto bm = build_breakeven_matrix(std::vector<double>(5, 0.7), corr, 1);
        REQUIRE(bm.factor_loadings.has_value());
        CHECK(bm.residual < 1e-10);
        // up to a global sign
        const double sign = (*bm.factor_loadings)(0, 0) * l[0] > 0.0 ? 1.0 : -1.0;
        for (int i = 0; i < 5; ++i)
            CHECK((*bm.factor_loadings)(i, 0) * sign == Approx(l[i]).margin(1e-6));
    }
    SECTION("rank-2 structures round trip at rank 2") {
        std::mt19937_64 gen(5);
        std::normal_distribution<double> nd;
        Eigen::MatrixXd load(6, 2);
        for (int i = 0; i < 6; ++i) {
            load(i, 0) = 0.5 * nd(gen);
            load(i, 1) = 0.4 * nd(gen);
            while (load.row(i).norm() >= 0.95) load.row(i) *= 0.7;
        }
        Eigen::MatrixXd corr = load * load.transpose();
        corr.diagonal().setOnes();
        const auto bm = build_breakeven_matrix(std::vector<double>(6, 1.1), corr, 2);
        REQUIRE(bm.factor_loadings.has_value());
        CHECK(bm.residual < 1e-9);
    }
    SECTION("PSD holds over randomized draws") {
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> us(0.1, 3.0);
        std::uniform_int_distribution<int> un(2, 8);
        for (int rep = 0; rep < 300; ++rep) {
            const int n = un(gen);
            std::vector<double> sig(n);
            for (auto& s : sig) s = us(gen);
            const auto bm = build_breakeven_matrix(sig, random_corr(n, gen));
            const auto diag = validate_correlation_matrix(bm.sigma_tilde);
            CHECK(diag.accepted);
        }
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(build_breakeven_matrix({1.0, 0.0}, flat_corr(2, 0.3)), DomainError);
        Eigen::MatrixXd bad(2, 2);
        bad << 1.0, 1.4, 1.4, 1.0;
        CHECK_THROWS_AS(build_breakeven_matrix({1.0, 1.0}, bad), DomainError);
    }
}

TEST_CASE("drift report with the break-even attached") {
    auto market = make_market({0.9, 0.8, 0.88}, 0.0, 5.0);
    const auto copula = CopulaSpec::gauss_flat(3, 0.3);
    const std::vector<double> betas = {1.0, 0.8, 1.2};
    const auto rep = drift_fptd_report(1, market, copula, betas, flat_corr(3, 0.4));
    REQUIRE(rep.breakeven.has_value());
    CHECK(rep.breakeven->found);
    CHECK(rep.breakeven->rho2 > 0.0);
    CHECK(rep.breakeven->rho2 < 0.4);
    // the plain report is unchanged by the attachment
    const auto plain = drift_fptd(1, market, copula, betas, flat_corr(3, 0.4));
    CHECK(rep.total == plain.total);
}
