#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tclplus/ncpoly.hpp"
#include "tclplus/superop.hpp"

namespace tclplus::expansion {

// ---- symbolic term generation ----

// Per-order term lists of the generator expansions, in Sigma_m symbols only
// (the leading lambda L-hat and trailing P are implicit and carry one power
// of lambda). orders[n-1] holds the order-n polynomial: all words of grade
// n-1. Order 1 is empty by the P L P = 0 convention.
std::vector<nc::Polynomial> expand_neumann_terms(int max_order);

// Same orders, generated by direct noncommutative expansion of
//   sum_k (Sigma^dag + Sigma - Sigma^dag Sigma)^k (I - Sigma)^dag Sigma.
// Daggered words appear at intermediate stages and cancel exactly on
// merging, so the result coincides with the Neumann list order by order;
// the cancellation is surfaced via dagger_cancellation_stats.
std::vector<nc::Polynomial> expand_pinv_terms(int max_order);

// Evidence that the pseudoinverse expansion's daggered words cancel: the
// peak number of daggered monomials present across partial k-sums at each
// order, and the number surviving in the full sum.
struct DaggerCancellation {
    int order;
    std::size_t peak_daggered_terms;
    std::size_t surviving_daggered_terms;
};

std::vector<DaggerCancellation> dagger_cancellation_stats(int max_order);

// ---- numeric Sigma(t) and generator assembly ----

// A concrete system+bath model: joint-space Hamiltonian h(t) (interaction
// picture), bath reference state, coupling strength.
struct TimeDependentModel {
    superop::SpaceDims dims;
    superop::BathState bath;
    std::function<ComplexMatrix(double)> hamiltonian;
    double lambda = 1.0;
    double t0 = 0.0;
};

// Nonperturbative Sigma(t): the time-ordered double-propagator integral,
// evaluated as ordered products of matrix exponentials on a uniform grid
// (midpoint-rule exponentials, trapezoid accumulation).
superop::SuperOperator sigma_exact(const TimeDependentModel& model, double t, int quad_steps);

// Perturbative coefficients of Sigma(t) = sum_m lambda^m Sigma_m(t).
// m = 1, 2 use the explicit integral forms (valid for shifted Hamiltonians,
// P L P = 0); m = 3, 4 are extracted from sigma_exact by central finite
// differences in lambda (5-point stencil, spacing 1e-2). m outside [1, 4]
// throws InvalidOrder.
superop::SuperOperator sigma_m(int m, double t, const TimeDependentModel& model, int quad_steps);

enum class Method { TCL, TCLplus, NonperturbativeInverse, NonperturbativePinv };

// Time-local generator K(t) at a single time.
//  - TCL / TCLplus: per-order symbolic polynomials bound to sigma_m values,
//    orders 2..5 (Sigma_m extraction caps the order).
//  - NonperturbativeInverse: lambda (P L) (I - Sigma)^{-1} P; throws
//    SingularGenerator when |det(I - Sigma)| falls below 1e-12 (breakdown).
//  - NonperturbativePinv: lambda (P L) (I - Sigma)^+ Sigma P.
superop::SuperOperator assemble_generator(Method method, int order, double t,
                                          const TimeDependentModel& model, int quad_steps);

// Nonperturbative generator core from an externally supplied Sigma(t)
// matrix; assemble_generator delegates here. Exposed so the singularity
// contract is testable on exactly singular inputs.
ComplexMatrix generator_from_sigma(Method method, const ComplexMatrix& sigma,
                                   const ComplexMatrix& lhat_p_left, const ComplexMatrix& p,
                                   double lambda, double t);

// Scans a time grid for the onset of the breakdown regime: first time
// ||Sigma(t)|| crosses 1 and first time |det(I - Sigma)| collapses.
struct BreakdownScan {
    std::optional<double> first_norm_crossing;
    std::optional<double> first_det_collapse;
};

BreakdownScan detect_breakdown(const TimeDependentModel& model,
                               const std::vector<double>& times, int quad_steps);

// Binds a polynomial in Sigma symbols to numeric superoperator values
// (values[m] for Sigma_m; daggered symbols bind to the adjoint).
ComplexMatrix bind_sigma_polynomial(const nc::Polynomial& poly,
                                    const std::vector<ComplexMatrix>& sigma_values,
                                    Eigen::Index dim);

}  // namespace tclplus::expansion
