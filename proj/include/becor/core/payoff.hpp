#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "becor/errors.hpp"

namespace becor {

enum class PayoffKind { Generic, FpTD, StopLoss, WorstOfDigital };

// European basket payoff: a total map from default-indicator vectors to an
// amount paid at maturity. Generic payoffs are enumerated (n <= 20, 2^n
// states); FpTD carries (p, R) so pricers can use the counting recursion
// instead and scale to large n.
struct BasketPayoff {
    int n = 0;
    PayoffKind kind = PayoffKind::Generic;
    int order = 0;         // p for FpTD / StopLoss
    double recovery = 0.0; // common R for FpTD / StopLoss
    std::function<double(const std::vector<int>&)> eval;

    static constexpr int kMaxGenericNames = 20;

    static BasketPayoff generic(int n, std::function<double(const std::vector<int>&)> f) {
        if (n > kMaxGenericNames)
            throw CapacityError("BasketPayoff: generic payoffs enumerate 2^n states, "
                                "n is capped at 20; use the FpTD recursion instead");
        require_domain(n >= 1, "BasketPayoff: need at least one name");
        BasketPayoff p;
        p.n = n;
        p.kind = PayoffKind::Generic;
        p.eval = std::move(f);
        return p;
    }

    // First p-th to default: min(sum delta_i, p) * (1-R).
    static BasketPayoff fptd(int n, int p, double recovery) {
        require_domain(p >= 1 && p <= n, "BasketPayoff: FpTD order must lie in 1..n");
        require_domain(recovery >= 0.0 && recovery < 1.0,
                       "BasketPayoff: recovery must lie in [0,1)");
        BasketPayoff b;
        b.n = n;
        b.kind = PayoffKind::FpTD;
        b.order = p;
        b.recovery = recovery;
        b.eval = [p, recovery](const std::vector<int>& d) {
            int s = 0;
            for (int v : d) s += v;
            return std::min(s, p) * (1.0 - recovery);
        };
        return b;
    }

    // Stop-loss indicator 1(sum delta <= p) * (1-R); building block in the
    // FpTD telescoping psi_p = psi_{p-1} + (1-R) - theta_{p-1}.
    static BasketPayoff stop_loss(int n, int p, double recovery) {
        require_domain(p >= 0 && p <= n, "BasketPayoff: stop-loss level must lie in 0..n");
        BasketPayoff b;
        b.n = n;
        b.kind = PayoffKind::StopLoss;
        b.order = p;
        b.recovery = recovery;
        b.eval = [p, recovery](const std::vector<int>& d) {
            int s = 0;
            for (int v : d) s += v;
            return (s <= p ? 1.0 : 0.0) * (1.0 - recovery);
        };
        return b;
    }

    // Digital on any default; equals FTD with zero recovery.
    static BasketPayoff worst_of_digital(int n) {
        BasketPayoff b = fptd(n, 1, 0.0);
        b.kind = PayoffKind::WorstOfDigital;
        return b;
    }
};

} // namespace becor
