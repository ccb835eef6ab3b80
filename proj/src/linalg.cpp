#include "tclplus/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <limits>

namespace tclplus::linalg {

ComplexMatrix SvdResult::reconstruct() const {
    return u * singular_values.asDiagonal() * v.adjoint();
}

SvdResult svd(const ComplexMatrix& a) {
    require_finite(a, "svd");
    Eigen::JacobiSVD<ComplexMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return SvdResult{solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

double operator_norm(const ComplexMatrix& a) {
    require_finite(a, "operator_norm");
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> solver(a);
    return solver.singularValues()(0);
}

Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        throw DimensionError("hs_inner: shape mismatch");
    }
    return (x.adjoint() * y).trace();
}

ComplexMatrix pinv_svd(const ComplexMatrix& a, double tol) {
    if (tol < 0) throw InvalidMatrix("pinv_svd: negative tolerance");
    SvdResult f = svd(a);
    const double smax = f.singular_values.size() ? f.singular_values(0) : 0.0;
    const double cut = tol * smax;
    RealVector inv = f.singular_values;
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
        inv(i) = (f.singular_values(i) > cut && f.singular_values(i) > 0.0)
                     ? 1.0 / f.singular_values(i)
                     : 0.0;
    }
    return f.v * inv.asDiagonal() * f.u.adjoint();
}

ComplexMatrix pinv_svd(const ComplexMatrix& a) {
    const double eps = std::numeric_limits<double>::epsilon();
    return pinv_svd(a, static_cast<double>(std::max(a.rows(), a.cols())) * eps);
}

ComplexMatrix pinv_series(const ComplexMatrix& a, long depth) {
    require_finite(a, "pinv_series");
    if (depth < 0) throw InvalidOrder("pinv_series: depth must be >= 0");
    const ComplexMatrix adag = a.adjoint();
    const ComplexMatrix m =
        ComplexMatrix::Identity(a.cols(), a.cols()) - adag * a;
    // S_{k+1} = M S_k + A^dagger telescopes the partial sums without
    // recomputing powers of M.
    ComplexMatrix s = adag;
    for (long k = 0; k < depth; ++k) {
        s = (m * s + adag).eval();
        if (!s.allFinite()) break;  // overflowed: divergence, return as-is
    }
    return s;
}

double PenroseResiduals::max() const {
    return std::max({a_p_a, p_a_p, ap_hermitian, pa_hermitian});
}

PenroseResiduals penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& p) {
    const ComplexMatrix ap = a * p;
    const ComplexMatrix pa = p * a;
    return PenroseResiduals{
        frobenius_norm(ap * a - a),
        frobenius_norm(pa * p - p),
        frobenius_norm(ap.adjoint() - ap),
        frobenius_norm(pa.adjoint() - pa),
    };
}

}  // namespace tclplus::linalg
