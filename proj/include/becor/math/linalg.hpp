#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "becor/errors.hpp"

namespace becor {

inline constexpr double kPsdEigTolerance = -1e-10;

struct CorrelationDiagnostics {
    bool square = false;
    double max_asymmetry = 0.0;
    double max_diagonal_deviation = 0.0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    bool accepted = false;
};

// Accepts iff symmetric, unit diagonal and smallest eigenvalue >= -1e-10.
// The eigenvalue slack absorbs round-off in user-supplied matrices without
// letting genuinely indefinite ones through.
inline CorrelationDiagnostics validate_correlation_matrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw ShapeError("validate_correlation_matrix: matrix is not square");
    CorrelationDiagnostics d;
    d.square = true;
    d.max_asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
    d.max_diagonal_deviation = (m.diagonal().array() - 1.0).abs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                      Eigen::EigenvaluesOnly);
    d.min_eigenvalue = es.eigenvalues().minCoeff();
    d.max_eigenvalue = es.eigenvalues().maxCoeff();
    d.accepted = d.max_asymmetry <= 1e-12 && d.max_diagonal_deviation <= 1e-12 &&
                 d.min_eigenvalue >= kPsdEigTolerance;
    return d;
}

// Factor L with L L^T = m for a PSD matrix. Cholesky when positive definite,
// eigenvalue square root otherwise (negative eigenvalues within tolerance are
// clamped to zero).
inline Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ShapeError("psd_factor: matrix is not square");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    if (es.info() != Eigen::Success)
        throw NumericError("psd_factor: eigen decomposition failed");
    const double lam_max = es.eigenvalues().maxCoeff();
    if (es.eigenvalues().minCoeff() < kPsdEigTolerance * std::max(1.0, lam_max))
        throw DomainError("psd_factor: matrix is not positive semi-definite");
    Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * sq.asDiagonal();
}

inline Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
    const auto r = rows.size();
    const auto c = r ? rows.front().size() : 0;
    Eigen::MatrixXd m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ShapeError("to_matrix: ragged rows");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

} // namespace becor
