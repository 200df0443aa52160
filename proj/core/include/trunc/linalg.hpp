#pragma once

#include <Eigen/Dense>
#include <optional>

namespace trunctest {

/// Symmetric PSD matrix with an optionally cached Cholesky factor and
/// log-determinant.
struct PsdMatrix {
    Eigen::MatrixXd entries;
    std::optional<Eigen::MatrixXd> chol;   // lower triangular
    std::optional<double> logdet;

    Eigen::Index size() const { return entries.rows(); }
};

/// Builds a PsdMatrix, enforcing symmetry to relative tolerance.
PsdMatrix make_psd(Eigen::MatrixXd m);

struct CholResult {
    Eigen::MatrixXd factor;  // lower triangular L with A = L L^T
    double logdet;
};

/// Cholesky factorization with log-determinant. Throws NotPositiveDefinite
/// when a pivot falls at or below tol * max diagonal entry.
CholResult chol_logdet(const Eigen::MatrixXd& a);
CholResult chol_logdet(PsdMatrix& a);  // caches factor and logdet

/// Solve A x = b given the lower Cholesky factor.
Eigen::VectorXd chol_solve(const Eigen::MatrixXd& factor, const Eigen::VectorXd& b);

}  // namespace trunctest
