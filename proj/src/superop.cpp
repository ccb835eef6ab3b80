#include "tclplus/superop.hpp"

#include <cmath>

#include "tclplus/linalg.hpp"

namespace tclplus::superop {

namespace {

void require_joint(const ComplexMatrix& x, SpaceDims dims, const char* who) {
    if (x.rows() != dims.joint() || x.cols() != dims.joint()) {
        throw DimensionError(std::string(who) + ": operator does not match joint dimension");
    }
}

void require_dense_ok(SpaceDims dims, const char* who) {
    if (dims.joint() > kMaxDenseJointDim) {
        throw CapacityError(std::string(who) +
                            ": joint dimension too large for dense superoperator; "
                            "use the apply_* forms");
    }
}

// Builds the dense matrix of a superoperator from its action on the
// operator basis E_ij (column-stacking convention).
template <typename Apply>
SuperOperator materialize(SpaceDims dims, Apply&& apply) {
    const Eigen::Index n = dims.joint();
    ComplexMatrix mat(n * n, n * n);
    ComplexMatrix basis = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            basis(i, j) = 1.0;
            mat.col(j * n + i) = vectorize(apply(basis));
            basis(i, j) = 0.0;
        }
    }
    return SuperOperator{dims, std::move(mat)};
}

}  // namespace

BathState make_bath_state(SpaceDims dims, const ComplexMatrix& rho_b) {
    if (dims.d_sys < 1 || dims.d_bath < 1) {
        throw DimensionError("make_bath_state: dimensions must be >= 1");
    }
    if (rho_b.rows() != dims.d_bath || rho_b.cols() != dims.d_bath) {
        throw DimensionError("make_bath_state: rho_b does not match d_bath");
    }
    require_finite(rho_b, "make_bath_state");
    if (std::abs(rho_b.trace() - Complex(1.0, 0.0)) > 1e-12) {
        throw InvalidMatrix("make_bath_state: rho_b must have unit trace");
    }
    if ((rho_b - rho_b.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw InvalidMatrix("make_bath_state: rho_b must be Hermitian");
    }
    return BathState{dims, rho_b};
}

ComplexVector vectorize(const ComplexMatrix& x) {
    if (x.rows() != x.cols()) throw DimensionError("vectorize: matrix must be square");
    const Eigen::Index n = x.rows();
    ComplexVector v(n * n);
    for (Eigen::Index j = 0; j < n; ++j) v.segment(j * n, n) = x.col(j);
    return v;
}

ComplexMatrix devectorize(const ComplexVector& v) {
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != v.size()) throw DimensionError("devectorize: length is not a perfect square");
    ComplexMatrix x(n, n);
    for (Eigen::Index j = 0; j < n; ++j) x.col(j) = v.segment(j * n, n);
    return x;
}

ComplexMatrix apply_liouvillian(const ComplexMatrix& h, const ComplexMatrix& x) {
    return Complex(0, -1) * (h * x - x * h);
}

ComplexMatrix apply_liouvillian_adjoint(const ComplexMatrix& h, const ComplexMatrix& x) {
    return Complex(0, 1) * (h * x - x * h);
}

ComplexMatrix partial_trace_bath(const ComplexMatrix& x, SpaceDims dims) {
    require_joint(x, dims, "partial_trace_bath");
    const Eigen::Index ds = dims.d_sys, db = dims.d_bath;
    ComplexMatrix out = ComplexMatrix::Zero(ds, ds);
    for (Eigen::Index s = 0; s < ds; ++s)
        for (Eigen::Index t = 0; t < ds; ++t)
            for (Eigen::Index b = 0; b < db; ++b) out(s, t) += x(s * db + b, t * db + b);
    return out;
}

ComplexMatrix apply_projector_p(const BathState& bath, const ComplexMatrix& x) {
    return kron(partial_trace_bath(x, bath.dims), bath.rho_b);
}

ComplexMatrix apply_projector_p_adjoint(const BathState& bath, const ComplexMatrix& x) {
    const SpaceDims dims = bath.dims;
    require_joint(x, dims, "apply_projector_p_adjoint");
    const ComplexMatrix weighted =
        x * kron(ComplexMatrix::Identity(dims.d_sys, dims.d_sys), bath.rho_b);
    return kron(partial_trace_bath(weighted, dims),
                ComplexMatrix::Identity(dims.d_bath, dims.d_bath));
}

SuperOperator liouvillian(const ComplexMatrix& h, SpaceDims dims) {
    require_joint(h, dims, "liouvillian");
    require_finite(h, "liouvillian");
    if (!is_hermitian(h, 1e-10)) {
        throw InvalidHamiltonian("liouvillian: Hamiltonian is not Hermitian");
    }
    require_dense_ok(dims, "liouvillian");
    // vec(-i[h, x]) = -i (I (x) h - h^T (x) I) vec(x)
    const Eigen::Index n = dims.joint();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    return SuperOperator{dims, Complex(0, -1) * (kron(id, h) - kron(h.transpose(), id))};
}

SuperOperator liouvillian_adjoint(const ComplexMatrix& h, SpaceDims dims) {
    SuperOperator l = liouvillian(h, dims);
    l.mat = (-l.mat).eval();
    return l;
}

SuperOperator projector_p(const BathState& bath) {
    require_dense_ok(bath.dims, "projector_p");
    return materialize(bath.dims, [&](const ComplexMatrix& x) { return apply_projector_p(bath, x); });
}

SuperOperator projector_p_adjoint(const BathState& bath) {
    require_dense_ok(bath.dims, "projector_p_adjoint");
    return materialize(bath.dims,
                       [&](const ComplexMatrix& x) { return apply_projector_p_adjoint(bath, x); });
}

SuperOperator identity_superop(SpaceDims dims) {
    require_dense_ok(dims, "identity_superop");
    return SuperOperator{dims, ComplexMatrix::Identity(dims.vec_dim(), dims.vec_dim())};
}

SuperOperator complement_q(const BathState& bath) {
    SuperOperator p = projector_p(bath);
    p.mat = (ComplexMatrix::Identity(p.mat.rows(), p.mat.cols()) - p.mat).eval();
    return p;
}

ComplexMatrix shift_hamiltonian(const ComplexMatrix& h, const BathState& bath) {
    const SpaceDims dims = bath.dims;
    require_joint(h, dims, "shift_hamiltonian");
    const ComplexMatrix weighted =
        h * kron(ComplexMatrix::Identity(dims.d_sys, dims.d_sys), bath.rho_b);
    const ComplexMatrix b_eff = partial_trace_bath(weighted, dims);
    return h - kron(b_eff, ComplexMatrix::Identity(dims.d_bath, dims.d_bath));
}

PlpReport plp_relations_check(const ComplexMatrix& h, const BathState& bath) {
    const ComplexMatrix p = projector_p(bath).mat;
    const ComplexMatrix pdag = p.adjoint();
    const ComplexMatrix l = liouvillian(h, bath.dims).mat;
    const ComplexMatrix ldag = l.adjoint();
    return PlpReport{
        linalg::operator_norm(p * l * p),
        linalg::operator_norm(pdag * ldag * pdag),
        linalg::operator_norm(pdag * l * p),
        linalg::operator_norm(p * l * pdag),
    };
}

}  // namespace tclplus::superop
