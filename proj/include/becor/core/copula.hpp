#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "becor/errors.hpp"

namespace becor {

enum class CopulaFamily { Gauss1F, GaussPF, Clayton };

// Static factor model: Gaussian loadings (scalar or p-vector per name) or a
// Clayton dependence parameter. Loadings are strict: |rho_i| < 1.
// Solvers additionally cap |rho| at 0.995 to keep 1/sqrt(1-rho^2) bounded;
// plain evaluation accepts anything below 1.
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Gauss1F;
    Eigen::MatrixXd loadings;  // n x p (p = 1 for Gauss1F); unused for Clayton
    double theta = 0.0;        // Clayton only
    int p = 1;                 // factor dimension

    std::size_t names() const {
        return family == CopulaFamily::Clayton ? clayton_names_
                                               : static_cast<std::size_t>(loadings.rows());
    }

    void validate() const {
        switch (family) {
        case CopulaFamily::Gauss1F:
            require_shape(loadings.cols() == 1, "CopulaSpec: Gauss1F needs scalar loadings");
            for (Eigen::Index i = 0; i < loadings.rows(); ++i)
                require_domain(std::fabs(loadings(i, 0)) < 1.0,
                               "CopulaSpec: |rho_i| must be < 1");
            break;
        case CopulaFamily::GaussPF:
            require_shape(loadings.cols() == p && p >= 1,
                          "CopulaSpec: loading width must equal factor dimension");
            for (Eigen::Index i = 0; i < loadings.rows(); ++i)
                require_domain(loadings.row(i).norm() < 1.0,
                               "CopulaSpec: Euclidean |rho_i| must be < 1");
            break;
        case CopulaFamily::Clayton:
            require_domain(theta >= 0.0, "CopulaSpec: Clayton theta must be >= 0");
            break;
        }
    }

    static CopulaSpec gauss_1f(const std::vector<double>& rho) {
        CopulaSpec c;
        c.family = CopulaFamily::Gauss1F;
        c.p = 1;
        c.loadings.resize(static_cast<Eigen::Index>(rho.size()), 1);
        for (std::size_t i = 0; i < rho.size(); ++i)
            c.loadings(static_cast<Eigen::Index>(i), 0) = rho[i];
        c.validate();
        return c;
    }

    // Flat one-factor loading for n names.
    static CopulaSpec gauss_flat(std::size_t n, double rho) {
        return gauss_1f(std::vector<double>(n, rho));
    }

    static CopulaSpec gauss_pf(const Eigen::MatrixXd& loadings) {
        CopulaSpec c;
        c.family = CopulaFamily::GaussPF;
        c.loadings = loadings;
        c.p = static_cast<int>(loadings.cols());
        c.validate();
        return c;
    }

    static CopulaSpec clayton(std::size_t n, double theta) {
        CopulaSpec c;
        c.family = CopulaFamily::Clayton;
        c.theta = theta;
        c.clayton_names_ = n;
        c.validate();
        return c;
    }

private:
    std::size_t clayton_names_ = 0;
};

inline constexpr double kSolverLoadingCap = 0.995;

} // namespace becor
