#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tclplus/expansion.hpp"
#include "tclplus/matrix.hpp"

namespace tclplus::ising {

enum class Method { TCL, TCLplus, Exact, BruteForce };

// Qubit dephasing against N bath qubits: H_I = sigma_z (x) B with
// B = sum_n g_n sigma_n^z - theta I and a product Gibbs reference state.
struct IsingConfig {
    int n_bath = 1;
    std::vector<double> couplings;  // g_n
    std::vector<double> omegas;     // site energies Omega_n
    double beta = 1.0;              // 1 / k_B T
    double lambda = 0.012;
    double t_max = 5.0;
    double dt = 0.005;
    int order = 5;  // 2, 4, 5
    Method method = Method::Exact;
    std::array<double, 3> initial_bloch{1.0, 0.0, 0.0};
};

// Site polarizations beta_n = tanh(-Omega_n beta / 2); the Gibbs state is
// the product of (I + beta_n sigma_z)/2.
std::vector<double> site_polarizations(const IsingConfig& cfg);

struct BathMoments {
    double theta = 0.0;
    std::array<double, 6> q{};  // q[n] = Q_n (central moments of B), q[1] = 0
    double tr_b = 0.0;          // Tr[B]
    double tr_b2_rho2 = 0.0;    // Tr[B^2 rho_B^2]
    double tr_brho_sq = 0.0;    // Tr[(B rho_B)^2], equals tr_b2_rho2
};

// Closed-form moments via per-site cumulants of independent +-g_n variables.
BathMoments bath_moments(const IsingConfig& cfg);

struct BlochTrajectory {
    std::vector<double> times;
    std::vector<double> vx, vy, vz;
};

// Product-formula solution: coherence factor
//   exp(-2 i lambda theta t) prod_n [cos(2 lambda g_n t) + i beta_n sin(2 lambda g_n t)].
BlochTrajectory exact_dephasing(const IsingConfig& cfg);

// Full 2^(N+1)-space evolution (diagonal Hamiltonian summed over every bath
// configuration) + partial trace. CapacityError for N > 12.
BlochTrajectory brute_force_dephasing(const IsingConfig& cfg);

// Dephasing amplitude f(t) and phase g(t) of the TCL solution
//   vx = f [vx0 cos g + vy0 sin g],  vy = f [vy0 cos g - vx0 sin g].
// Order 2: f = exp(-2 Q2 l^2 t^2), g = 0. Order 4 adds the t^4 term to f and
// the t^3 term to g. Order 5 adds the t^5 term to g.
struct FgValue {
    double f;
    double g;
};
FgValue tcl_fg(int order, double t, const BathMoments& moments, const IsingConfig& cfg);

// Value of the odd fifth-order adjoint chain 2 P L Pdag L L P L L P on
// rho_S (x) rho_B, reduced over the bath: the scalar s in
//   s * (sigma_z rho_S - rho_S sigma_z).
// Purely imaginary; validated against direct superoperator evaluation.
Complex tclplus_term5_scalar(const BathMoments& moments);

// The resulting lambda^5-graded correction to the phase g(t) (the amplitude
// f is untouched: the extra term is odd/phase-type).
double tclplus_extra_term5(const BathMoments& moments, double t, const IsingConfig& cfg);

BlochTrajectory run_ising(const IsingConfig& cfg);

// Joint-space model (shifted Hamiltonian + Gibbs bath state) for
// superoperator-level checks; dense, so N is capped by the materialization
// limit.
expansion::TimeDependentModel joint_model(const IsingConfig& cfg);

// Gibbs bath state as an explicit diagonal density matrix (2^N x 2^N).
ComplexMatrix gibbs_bath_matrix(const IsingConfig& cfg);
// Shifted bath operator B as an explicit diagonal matrix.
ComplexMatrix bath_operator_matrix(const IsingConfig& cfg);

// Fixed-seed default parameter set used for the four (N, beta) cells:
// uniform Omega_n = 0.2, g_n drawn once from U[0.5, 1.0].
IsingConfig default_config(int n_bath, double beta, std::uint64_t seed = 7041);

}  // namespace tclplus::ising
