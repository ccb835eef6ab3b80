#pragma once

#include "tclplus/matrix.hpp"

namespace tclplus::linalg {

// Factorization a = u * diag(singular_values) * v^dagger with u, v unitary
// and the singular values sorted descending.
struct SvdResult {
    ComplexMatrix u;
    RealVector singular_values;
    ComplexMatrix v;

    ComplexMatrix reconstruct() const;
};

SvdResult svd(const ComplexMatrix& a);

// Largest singular value.
double operator_norm(const ComplexMatrix& a);

// Hilbert-Schmidt inner product Tr[x^dagger y].
Complex hs_inner(const ComplexMatrix& x, const ComplexMatrix& y);

// Moore-Penrose pseudoinverse via SVD. Singular values <= tol * sigma_max are
// treated as zero. The default tol is max(rows, cols) * machine epsilon.
ComplexMatrix pinv_svd(const ComplexMatrix& a, double tol);
ComplexMatrix pinv_svd(const ComplexMatrix& a);

// Partial sum  sum_{k=0}^{depth} (I - A^dagger A)^k A^dagger  of the
// Ben-Israel/Charnes pseudoinverse series. Converges to pinv(a) exactly when
// every singular value d satisfies d^2 < 2 (d^2 = 2 oscillates, beyond it
// diverges); callers are responsible for convergence checks, divergence is a
// legitimate measured outcome.
ComplexMatrix pinv_series(const ComplexMatrix& a, long depth);

// Residuals of the four Moore-Penrose conditions for candidate p, in order:
// A p A = A,  p A p = p,  (A p)^dagger = A p,  (p A)^dagger = p A.
// Frobenius norms of the differences.
struct PenroseResiduals {
    double a_p_a;
    double p_a_p;
    double ap_hermitian;
    double pa_hermitian;
    double max() const;
};

PenroseResiduals penrose_residuals(const ComplexMatrix& a, const ComplexMatrix& p);

}  // namespace tclplus::linalg
