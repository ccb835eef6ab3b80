#pragma once

#include <Eigen/Dense>
#include <complex>

#include "tclplus/errors.hpp"

namespace tclplus {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline bool all_finite(const ComplexMatrix& a) {
    return a.allFinite();
}

// Matrices entering linalg/superop operations must be finite; NaN or Inf
// entries poison everything downstream silently otherwise.
inline void require_finite(const ComplexMatrix& a, const char* who) {
    if (!all_finite(a)) {
        throw InvalidMatrix(std::string(who) + ": matrix has non-finite entries");
    }
}

inline ComplexMatrix dagger(const ComplexMatrix& a) {
    return a.adjoint();
}

inline double frobenius_norm(const ComplexMatrix& a) {
    return a.norm();
}

// Kronecker product, row-blocks of a scaled by entries of a.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Pauli matrices in the (|0>, |1>) basis, sigma_z|0> = +|0>.
inline ComplexMatrix pauli_x() {
    ComplexMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline ComplexMatrix pauli_y() {
    ComplexMatrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
}

inline ComplexMatrix pauli_z() {
    ComplexMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// |1><0|, the raising operator: sigma_plus |0> = |1>.
inline ComplexMatrix sigma_plus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(1, 0) = 1.0;
    return m;
}

inline ComplexMatrix sigma_minus() {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

}  // namespace tclplus
