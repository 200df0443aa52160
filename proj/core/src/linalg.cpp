#include "trunc/linalg.hpp"

#include <cmath>

#include "trunc/constants.hpp"
#include "trunc/errors.hpp"

namespace trunctest {

PsdMatrix make_psd(Eigen::MatrixXd m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("make_psd: matrix must be square");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > defaults().symmetry_tol * scale)
        throw InvalidArgument("make_psd: matrix is not symmetric within tolerance");
    return PsdMatrix{std::move(m), std::nullopt, std::nullopt};
}

CholResult chol_logdet(const Eigen::MatrixXd& a) {
    const Eigen::Index p = a.rows();
    if (p != a.cols()) throw DimensionMismatch("chol_logdet: matrix must be square");
    const double pivot_floor = defaults().chol_pivot_tol * a.diagonal().maxCoeff();

    Eigen::MatrixXd l = a.triangularView<Eigen::Lower>();
    double logdet = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
        double d = l(j, j);
        for (Eigen::Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > pivot_floor)) throw NotPositiveDefinite("chol_logdet: pivot at column " +
                                                          std::to_string(j));
        const double diag = std::sqrt(d);
        l(j, j) = diag;
        logdet += 2.0 * std::log(diag);
        if (j + 1 < p) {
            // column update: L(j+1:, j) = (A(j+1:, j) - L(j+1:, :j) L(j, :j)^T) / diag
            auto tail = l.col(j).segment(j + 1, p - j - 1);
            if (j > 0)
                tail.noalias() -= l.block(j + 1, 0, p - j - 1, j) * l.row(j).head(j).transpose();
            tail /= diag;
        }
    }
    l.triangularView<Eigen::StrictlyUpper>().setZero();
    return CholResult{std::move(l), logdet};
}

CholResult chol_logdet(PsdMatrix& a) {
    if (a.chol && a.logdet) return CholResult{*a.chol, *a.logdet};
    CholResult r = chol_logdet(a.entries);
    a.chol = r.factor;
    a.logdet = r.logdet;
    return r;
}

Eigen::VectorXd chol_solve(const Eigen::MatrixXd& factor, const Eigen::VectorXd& b) {
    Eigen::VectorXd y = factor.triangularView<Eigen::Lower>().solve(b);
    return factor.transpose().triangularView<Eigen::Upper>().solve(y);
}

}  // namespace trunctest
