#pragma once

#include "tclplus/matrix.hpp"

namespace tclplus::superop {

struct SpaceDims {
    Eigen::Index d_sys = 1;
    Eigen::Index d_bath = 1;

    Eigen::Index joint() const { return d_sys * d_bath; }
    Eigen::Index vec_dim() const { return joint() * joint(); }
};

// Dense matrix acting on column-stacked operators of the joint space.
struct SuperOperator {
    SpaceDims dims;
    ComplexMatrix mat;
};

// Reference state of the bath: Hermitian, unit trace, PSD.
struct BathState {
    SpaceDims dims;
    ComplexMatrix rho_b;
};

BathState make_bath_state(SpaceDims dims, const ComplexMatrix& rho_b);

// Column-stacking vectorization: entry (i, j) of an n x n operator lands at
// index j*n + i. All superoperator matrices in this project use this
// convention.
ComplexVector vectorize(const ComplexMatrix& x);
ComplexMatrix devectorize(const ComplexVector& v);

// Explicit materialization is refused above this joint dimension; use the
// apply_* operator forms there.
inline constexpr Eigen::Index kMaxDenseJointDim = 64;

// ---- operator-form applications (work at any dimension) ----

// -i [h, x]
ComplexMatrix apply_liouvillian(const ComplexMatrix& h, const ComplexMatrix& x);
// +i [h, x]
ComplexMatrix apply_liouvillian_adjoint(const ComplexMatrix& h, const ComplexMatrix& x);
// Tr_B[x] (x) rho_b
ComplexMatrix apply_projector_p(const BathState& bath, const ComplexMatrix& x);
// Tr_B[x (I_s (x) rho_b)] (x) I_b
ComplexMatrix apply_projector_p_adjoint(const BathState& bath, const ComplexMatrix& x);

ComplexMatrix partial_trace_bath(const ComplexMatrix& x, SpaceDims dims);

// ---- dense superoperator builders (joint dim <= kMaxDenseJointDim) ----

SuperOperator liouvillian(const ComplexMatrix& h, SpaceDims dims);
SuperOperator liouvillian_adjoint(const ComplexMatrix& h, SpaceDims dims);
SuperOperator projector_p(const BathState& bath);
SuperOperator projector_p_adjoint(const BathState& bath);
SuperOperator identity_superop(SpaceDims dims);
// Q = I - P
SuperOperator complement_q(const BathState& bath);

// Shift h so that the bath operators acquire zero mean in the reference
// state, enforcing P L P = 0:  h -> h - Tr_B[h (I_s (x) rho_b)] (x) I_b.
ComplexMatrix shift_hamiltonian(const ComplexMatrix& h, const BathState& bath);

// Operator norms of the projector/Liouvillian sandwiches. With a shifted
// Hamiltonian the first two vanish; the last two are generically nonzero
// (they vanish for pure rho_b and traceless bath operators respectively).
struct PlpReport {
    double p_l_p;
    double pdag_ldag_pdag;
    double pdag_l_p;
    double p_l_pdag;
};

PlpReport plp_relations_check(const ComplexMatrix& h, const BathState& bath);

}  // namespace tclplus::superop
