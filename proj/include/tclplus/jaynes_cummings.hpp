#pragma once

#include <optional>
#include <vector>

#include "tclplus/matrix.hpp"

namespace tclplus::jc {

enum class Method { TCL, TCLplus, Exact };

// Qubit in a Lorentzian bosonic bath, interaction picture, 1-excitation
// sector. gamma0 / nu_b >> 1 puts the exact amplitude through a zero inside
// t_max, the breakdown regime the rate expansions are probed in.
struct JcConfig {
    double gamma0 = 10.0;  // spectral density strength
    double omega0 = 1.0;   // system excitation frequency
    double nu_b = 1.0;     // Lorentzian half width
    double lambda = 1.0;   // coupling
    int n_modes = 1600;    // bath discretization
    double window = 70.0;  // mode grid spans omega0 +- window * nu_b
    int bath_dim_cutoff = 1;  // bath dimension used by the adjoint terms
    double adjoint_window = 4.0;  // window of the few-mode bath behind them
    double t_max = 2.0;
    double dt = 1e-3;
    int order = 2;  // 2, 4, 6
    Method method = Method::Exact;
    double initial_c1 = 1.0;  // excited-state amplitude at t = 0
};

struct Mode {
    double omega;
    double g;
};

// J(omega) sampled on a uniform grid symmetric about omega0, g_k^2 = J Δω.
std::vector<Mode> discretize_bath(const JcConfig& cfg);

// Closed-form correlation function of the Lorentzian density:
// f(tau) = (gamma0 nu_b / 2) exp(-nu_b |tau|), real at resonance.
Complex bath_correlation(double tau, const JcConfig& cfg);

// Correlation of the discretized bath, sum_k g_k^2 exp(i (omega0 - omega_k) tau).
Complex discrete_correlation(const std::vector<Mode>& modes, double omega0, double tau);

struct JcTrajectory {
    std::vector<double> times;
    std::vector<double> rho11;
    std::vector<Complex> coherence;     // rho_01 element
    std::optional<double> diverged_at;  // NaN detected; trajectory truncated
    double max_trace_drift = 0.0;       // max |Tr rho - 1| along the run
    double max_hermiticity_drift = 0.0; // max ||rho - rho^dag|| along the run
};

// Amplitude equations of the 1-excitation sector integrated as an
// (n_modes + 1)-dimensional linear ODE with fixed-step RK4.
JcTrajectory exact_one_excitation(const JcConfig& cfg);

// Cumulative decay rate gamma(t) and Lamb shift S(t) through the requested
// order (2, 4 or 6), built from iterated simplex integrals of the bath
// correlation function. The correlation used is the discretized bath's, so
// rate-based methods and the exact sector solution see the same bath.
struct RateValue {
    double gamma;
    double s;
};
RateValue tcl_rates(int order, double t, const JcConfig& cfg);

// Modes of the coarse bath the adjoint terms are evaluated on: the same
// spectral density sampled with coupled_modes points over
// omega0 +- adjoint_window * nu_b, so a handful of modes still carries the
// bulk of the correlation weight.
std::vector<Mode> adjoint_bath_modes(const JcConfig& cfg, int coupled_modes);

// Values of the two surviving sixth-order adjoint chains evaluated on
// sigma_+ (x) rho_B over a truncated bath of the given total dimension
// (vacuum + coupled single-excitation modes + inert padding states).
// term_pp carries the explicit Tr[I_B] factor from the P Pdag pair.
struct JcExtraTerms {
    Complex term_pp;    // P L L P Pdag L L P L L P
    Complex term_pmid;  // P L L Pdag L L P L L P
    Complex total() const { return term_pp + term_pmid; }
};

JcExtraTerms tclplus_extra_terms6(double t, const JcConfig& cfg, int truncated_bath_dim);
// Same, with the number of coupled modes fixed independently of the total
// bath dimension; extra states are inert and enter only through Tr[I_B].
JcExtraTerms tclplus_extra_terms6_padded(double t, const JcConfig& cfg, int coupled_modes,
                                         int total_bath_dim);

// Two-time kernels of the P-to-P blocks on the truncated bath, evaluated by
// direct superoperator application. Both are stationary (depend on a - b).
struct KernelValue {
    Complex value;
    double residual;  // norm of the component off the eigenoperator ray
};
KernelValue kernel_pll(double tau, const JcConfig& cfg, int coupled_modes, int total_bath_dim);
KernelValue kernel_pll_pdag(double tau, const JcConfig& cfg, int coupled_modes,
                            int total_bath_dim);

JcTrajectory run_jc(const JcConfig& cfg);

}  // namespace tclplus::jc
