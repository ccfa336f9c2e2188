#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "becor/errors.hpp"

namespace becor {

// Flat hazard rate h with Q = exp(-h (T-t)). Q must lie strictly inside (0,1):
// the degenerate limits occur only at maturity and would break Phi^{-1}.
inline double hazard_from_survival(double q, double t, double maturity) {
    require_domain(q > 0.0 && q < 1.0, "hazard_from_survival: Q must lie in (0,1)");
    require_domain(t < maturity, "hazard_from_survival: need t < T");
    return -std::log(q) / (maturity - t);
}

inline double survival_from_hazard(double h, double t, double maturity) {
    require_domain(t < maturity, "survival_from_hazard: need t < T");
    return std::exp(-h * (maturity - t));
}

// The hedgeable primitives: per-name survival probabilities to the common
// maturity plus recoveries. Immutable after construction.
struct MarketState {
    std::vector<std::string> names;
    double maturity = 0.0;  // T, year fraction
    double t = 0.0;         // valuation time, in [0, T)
    std::vector<double> survival;   // Q_i, in (0,1) unless defaulted (then 0)
    std::vector<double> recovery;   // R_i, in [0,1)
    std::vector<bool> defaulted;

    std::size_t size() const { return survival.size(); }

    double hazard(std::size_t i) const {
        return hazard_from_survival(survival[i], t, maturity);
    }

    void validate() const {
        const std::size_t n = survival.size();
        require_shape(recovery.size() == n && defaulted.size() == n &&
                          (names.empty() || names.size() == n),
                      "MarketState: field lengths disagree");
        require_domain(maturity > 0.0 && t >= 0.0 && t < maturity,
                       "MarketState: need 0 <= t < T");
        for (std::size_t i = 0; i < n; ++i) {
            if (defaulted[i]) {
                require_domain(survival[i] == 0.0,
                               "MarketState: defaulted name must carry Q = 0");
            } else {
                require_domain(survival[i] > 0.0 && survival[i] < 1.0,
                               "MarketState: Q must lie in (0,1) for live names");
            }
            require_domain(recovery[i] >= 0.0 && recovery[i] < 1.0,
                           "MarketState: recovery must lie in [0,1)");
        }
    }
};

// Homogeneous-recovery basket shortcut used across tests and the CLI.
inline MarketState make_market(std::vector<double> survival, double recovery,
                               double maturity, double t = 0.0) {
    MarketState m;
    m.maturity = maturity;
    m.t = t;
    m.survival = std::move(survival);
    m.recovery.assign(m.survival.size(), recovery);
    m.defaulted.assign(m.survival.size(), false);
    m.validate();
    return m;
}

} // namespace becor
