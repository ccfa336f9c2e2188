#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "becor/errors.hpp"
#include "becor/math/linalg.hpp"

namespace becor {

enum class XiFamily { Merton, PowerAlpha, Table };

// Deterministic time profile xi(t) of the replication-consistent dynamics
// dQ = sigma_bar xi(t) phi(Phi^{-1}(Q)) dW. Merton and PowerAlpha satisfy
// int_0^t xi^2 -> infinity as t -> T, which drives Q to {0,1} at maturity;
// a tabulated profile cannot and is flagged non-terminating.
struct XiFunction {
    XiFamily family = XiFamily::Merton;
    double maturity = 0.0;
    double alpha = 0.0;                 // PowerAlpha, alpha < 0.5
    std::vector<double> table_times;    // Table: left edges, piecewise constant
    std::vector<double> table_values;

    static XiFunction merton(double maturity) {
        require_domain(maturity > 0.0, "XiFunction: maturity must be positive");
        XiFunction x;
        x.family = XiFamily::Merton;
        x.maturity = maturity;
        return x;
    }

    static XiFunction power_alpha(double maturity, double alpha) {
        require_domain(alpha < 0.5, "XiFunction: PowerAlpha needs alpha < 0.5");
        require_domain(maturity > 0.0, "XiFunction: maturity must be positive");
        XiFunction x;
        x.family = XiFamily::PowerAlpha;
        x.maturity = maturity;
        x.alpha = alpha;
        return x;
    }

    static XiFunction table(double maturity, std::vector<double> times,
                            std::vector<double> values) {
        require_shape(times.size() == values.size() && !times.empty(),
                      "XiFunction: table sizes disagree");
        XiFunction x;
        x.family = XiFamily::Table;
        x.maturity = maturity;
        x.table_times = std::move(times);
        x.table_values = std::move(values);
        return x;
    }

    bool terminating() const { return family != XiFamily::Table; }

    double value(double t) const {
        require_domain(t >= 0.0 && t < maturity, "XiFunction: t must lie in [0,T)");
        switch (family) {
        case XiFamily::Merton:
            return 1.0 / std::sqrt(maturity - t);
        case XiFamily::PowerAlpha:
            return std::pow(1.0 - t / maturity, -alpha);
        case XiFamily::Table: {
            double v = table_values.front();
            for (std::size_t k = 0; k < table_times.size(); ++k)
                if (table_times[k] <= t) v = table_values[k];
            return v;
        }
        }
        return 0.0;
    }

    // int_a^b xi(u)^2 du, closed form for Merton/PowerAlpha.
    double integral_sq(double a, double b) const {
        require_domain(0.0 <= a && a <= b && b <= maturity,
                       "XiFunction: need 0 <= a <= b <= T");
        switch (family) {
        case XiFamily::Merton:
            if (b >= maturity) return std::numeric_limits<double>::infinity();
            return std::log((maturity - a) / (maturity - b));
        case XiFamily::PowerAlpha: {
            // int (1-u/T)^{-2 alpha} du = T/(1-2a) [(1-a/T)^{1-2a} - (1-b/T)^{1-2a}]
            const double e = 1.0 - 2.0 * alpha;
            return maturity / e *
                   (std::pow(1.0 - a / maturity, e) - std::pow(1.0 - b / maturity, e));
        }
        case XiFamily::Table: {
            double acc = 0.0;
            for (std::size_t k = 0; k < table_times.size(); ++k) {
                const double lo = table_times[k];
                const double hi = (k + 1 < table_times.size()) ? table_times[k + 1]
                                                               : maturity;
                const double ov = std::max(0.0, std::min(b, hi) - std::max(a, lo));
                acc += table_values[k] * table_values[k] * ov;
            }
            return acc;
        }
        }
        return 0.0;
    }
};

// Drives the simulation of survival probabilities: per-name sigma_bar, the
// common xi profile, the spread-correlation matrix and an optional historical
// drift mu_i(t, Q) (zero by default; the paper never pins a functional form).
struct DynamicsSpec {
    std::vector<double> sigma_bar;
    XiFunction xi;
    Eigen::MatrixXd spread_corr;
    std::function<double(std::size_t, double, double)> mu;  // (name, t, Q) -> drift

    void validate() const {
        const auto n = sigma_bar.size();
        require_shape(spread_corr.rows() == static_cast<Eigen::Index>(n) &&
                          spread_corr.cols() == static_cast<Eigen::Index>(n),
                      "DynamicsSpec: correlation matrix size disagrees with names");
        for (double s : sigma_bar)
            require_domain(s >= 0.0, "DynamicsSpec: sigma_bar must be >= 0");
        const auto diag = validate_correlation_matrix(spread_corr);
        require_domain(diag.accepted,
                       "DynamicsSpec: spread correlation matrix rejected (must be "
                       "symmetric, unit diagonal, PSD)");
    }

    bool has_drift() const { return static_cast<bool>(mu); }
};

} // namespace becor
