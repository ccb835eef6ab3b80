#include "tclplus/jaynes_cummings.hpp"

#include <algorithm>
#include <cmath>

#include "tclplus/linalg.hpp"
#include "tclplus/superop.hpp"

namespace tclplus::jc {

namespace {

void validate(const JcConfig& cfg) {
    if (cfg.gamma0 <= 0) throw ConfigError("jc: gamma0 must be > 0");
    if (cfg.nu_b <= 0) throw ConfigError("jc: nu_b must be > 0");
    if (cfg.lambda < 0) throw ConfigError("jc: lambda must be >= 0");
    if (cfg.n_modes < 1) throw ConfigError("jc: n_modes must be >= 1");
    if (cfg.dt <= 0 || cfg.t_max <= 0) throw ConfigError("jc: dt and t_max must be > 0");
    if (cfg.window <= 0) throw ConfigError("jc: window must be > 0");
    if (cfg.initial_c1 < 0 || cfg.initial_c1 > 1) {
        throw ConfigError("jc: initial_c1 must lie in [0, 1]");
    }
}

double lorentzian_density(double omega, const JcConfig& cfg) {
    const double x = (omega - cfg.omega0) / cfg.nu_b;
    return cfg.gamma0 / (2.0 * M_PI) / (1.0 + x * x);
}

// ---- quadrature on uniform grids ----

// Running trapezoid integral, out[j] = int_0^{t_j} v.
template <typename T>
std::vector<T> cumulative_trapezoid(const std::vector<T>& v, double h) {
    std::vector<T> out(v.size(), T{});
    for (std::size_t j = 1; j < v.size(); ++j) {
        out[j] = out[j - 1] + (0.5 * h) * (v[j - 1] + v[j]);
    }
    return out;
}

// Composite-Simpson weight of sample i in the integral over [0, t_j]
// (trapezoid fallback on short or odd tails), unit spacing.
double simpson_weight(std::size_t i, std::size_t j) {
    if (j == 0) return 0.0;
    if (j == 1) return 0.5;
    const bool odd = (j % 2 != 0);
    const std::size_t last = odd ? j - 1 : j;  // Simpson covers [0, last]
    double w;
    if (i > last) {
        w = 0.0;
    } else if (i == 0 || i == last) {
        w = 1.0 / 3.0;
    } else {
        w = (i % 2 == 1) ? 4.0 / 3.0 : 2.0 / 3.0;
    }
    if (odd && (i == j || i == j - 1)) w += 0.5;
    return w;
}

// Convolution integral out[j] = int_0^{t_j} kernel(t_j - s) src(s) ds with
// Simpson weights; kernel is tabulated on the same grid.
std::vector<Complex> convolve(const std::vector<Complex>& kernel, const std::vector<Complex>& src,
                              double h) {
    const std::size_t n = src.size();
    std::vector<Complex> out(n, Complex(0, 0));
    for (std::size_t j = 1; j < n; ++j) {
        Complex acc(0, 0);
        for (std::size_t i = 0; i <= j; ++i) {
            acc += simpson_weight(i, j) * kernel[j - i] * src[i];
        }
        out[j] = h * acc;
    }
    return out;
}

}  // namespace

std::vector<Mode> discretize_bath(const JcConfig& cfg) {
    validate(cfg);
    const double lo = cfg.omega0 - cfg.window * cfg.nu_b;
    const double dw = 2.0 * cfg.window * cfg.nu_b / cfg.n_modes;
    std::vector<Mode> modes;
    modes.reserve(cfg.n_modes);
    // Midpoint sampling keeps the grid symmetric about omega0 for any count.
    for (int k = 0; k < cfg.n_modes; ++k) {
        const double omega = lo + (k + 0.5) * dw;
        modes.push_back(Mode{omega, std::sqrt(lorentzian_density(omega, cfg) * dw)});
    }
    return modes;
}

Complex bath_correlation(double tau, const JcConfig& cfg) {
    validate(cfg);
    return Complex(0.5 * cfg.gamma0 * cfg.nu_b * std::exp(-cfg.nu_b * std::abs(tau)), 0.0);
}

Complex discrete_correlation(const std::vector<Mode>& modes, double omega0, double tau) {
    Complex acc(0, 0);
    for (const Mode& m : modes) {
        acc += m.g * m.g * std::exp(Complex(0, (omega0 - m.omega) * tau));
    }
    return acc;
}

JcTrajectory exact_one_excitation(const JcConfig& cfg) {
    validate(cfg);
    const std::vector<Mode> modes = discretize_bath(cfg);
    const int nm = cfg.n_modes;
    const double c1_0 = cfg.initial_c1;
    const double c0 = std::sqrt(std::max(0.0, 1.0 - c1_0 * c1_0));

    // State y = (c1, c_k...); cdot_1 = -i l sum_k g_k e^{+i(w0-wk)t} c_k,
    // cdot_k = -i l g_k e^{-i(w0-wk)t} c_1.
    ComplexVector y = ComplexVector::Zero(nm + 1);
    y(0) = c1_0;
    auto deriv = [&](double t, const ComplexVector& v) {
        ComplexVector d = ComplexVector::Zero(nm + 1);
        Complex acc(0, 0);
        for (int k = 0; k < nm; ++k) {
            const Complex phase = std::exp(Complex(0, (cfg.omega0 - modes[k].omega) * t));
            acc += modes[k].g * phase * v(k + 1);
            d(k + 1) = Complex(0, -cfg.lambda) * modes[k].g * std::conj(phase) * v(0);
        }
        d(0) = Complex(0, -cfg.lambda) * acc;
        return d;
    };

    const auto steps = static_cast<long>(std::llround(cfg.t_max / cfg.dt));
    JcTrajectory traj;
    traj.times.reserve(steps + 1);
    traj.rho11.reserve(steps + 1);
    traj.coherence.reserve(steps + 1);
    for (long i = 0; i <= steps; ++i) {
        const double t = i * cfg.dt;
        traj.times.push_back(t);
        traj.rho11.push_back(std::norm(y(0)));
        traj.coherence.push_back(c0 * std::conj(y(0)));
        if (i == steps) break;
        const ComplexVector k1 = deriv(t, y);
        const ComplexVector k2 = deriv(t + 0.5 * cfg.dt, y + (0.5 * cfg.dt) * k1);
        const ComplexVector k3 = deriv(t + 0.5 * cfg.dt, y + (0.5 * cfg.dt) * k2);
        const ComplexVector k4 = deriv(t + cfg.dt, y + cfg.dt * k3);
        y += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return traj;
}

namespace {

// Iterated-integral stack behind the cumulative rates: c^(j+1)'(t) =
// -int_0^t f(t-s) c^(j)(s) ds with c^(0) = 1. The rate through order 2n is
// the lambda-expansion of -2 c1'/c1 truncated at lambda^{2n}; the
// combinations below are its coefficients.
struct RateStack {
    double h = 0;
    std::vector<Complex> cd1, c1, cd2, c2, cd3;
};

RateStack build_rate_stack(const JcConfig& cfg, int order, double t_end, double h) {
    const std::vector<Mode> modes = discretize_bath(cfg);
    const auto n = static_cast<std::size_t>(std::llround(t_end / h)) + 1;
    std::vector<Complex> f_tab(n);
    for (std::size_t j = 0; j < n; ++j) {
        f_tab[j] = discrete_correlation(modes, cfg.omega0, static_cast<double>(j) * h);
    }
    RateStack st;
    st.h = h;
    const std::vector<Complex> f_cum = cumulative_trapezoid(f_tab, h);
    st.cd1.resize(n);
    for (std::size_t j = 0; j < n; ++j) st.cd1[j] = -f_cum[j];
    st.c1 = cumulative_trapezoid(st.cd1, h);
    if (order >= 4) {
        st.cd2 = convolve(f_tab, st.c1, h);
        for (Complex& v : st.cd2) v = -v;
        st.c2 = cumulative_trapezoid(st.cd2, h);
    }
    if (order >= 6) {
        st.cd3 = convolve(f_tab, st.c2, h);
        for (Complex& v : st.cd3) v = -v;
    }
    return st;
}

Complex rate_at(const RateStack& st, const JcConfig& cfg, int order, std::size_t j) {
    const double l2 = cfg.lambda * cfg.lambda;
    Complex r = -2.0 * l2 * st.cd1[j];
    if (order >= 4) {
        r += -2.0 * l2 * l2 * (st.cd2[j] - st.cd1[j] * st.c1[j]);
    }
    if (order >= 6) {
        r += -2.0 * l2 * l2 * l2 *
             (st.cd3[j] - st.cd2[j] * st.c1[j] - st.cd1[j] * st.c2[j] +
              st.cd1[j] * st.c1[j] * st.c1[j]);
    }
    return r;
}

void require_order(int order) {
    if (order != 2 && order != 4 && order != 6) {
        throw InvalidOrder("jc: rate order must be one of {2, 4, 6}");
    }
}

}  // namespace

RateValue tcl_rates(int order, double t, const JcConfig& cfg) {
    validate(cfg);
    require_order(order);
    if (t < 0) throw InvalidOrder("tcl_rates: t must be >= 0");
    if (t == 0) return RateValue{0.0, 0.0};
    const double h = 0.5 * cfg.dt;
    const auto j = static_cast<std::size_t>(std::llround(t / h));
    const RateStack st = build_rate_stack(cfg, order, static_cast<double>(j) * h, h);
    const Complex r = rate_at(st, cfg, order, j);
    return RateValue{r.real(), r.imag()};
}

// ---- sixth-order adjoint terms on a truncated bath ----

namespace {

struct TruncatedBath {
    superop::SpaceDims dims;
    std::vector<Mode> coupled;  // modes with nonzero coupling
    superop::BathState bath;    // vacuum reference
    ComplexMatrix x0;           // sigma_plus (x) |vac><vac|
};

TruncatedBath build_truncated(const JcConfig& cfg, int coupled_modes, int total_bath_dim) {
    if (total_bath_dim < 1) throw ConfigError("jc: truncated bath dimension must be >= 1");
    if (coupled_modes > total_bath_dim - 1) {
        throw ConfigError("jc: coupled modes cannot exceed bath dimension - 1");
    }
    TruncatedBath tb;
    tb.dims = superop::SpaceDims{2, total_bath_dim};
    tb.coupled = adjoint_bath_modes(cfg, coupled_modes);
    ComplexMatrix rho = ComplexMatrix::Zero(total_bath_dim, total_bath_dim);
    rho(0, 0) = 1.0;
    tb.bath = superop::make_bath_state(tb.dims, rho);
    ComplexMatrix vac = ComplexMatrix::Zero(total_bath_dim, total_bath_dim);
    vac(0, 0) = 1.0;
    tb.x0 = kron(sigma_plus(), vac);
    return tb;
}

// Interaction-picture Hamiltonian on the truncated space: the lowering
// operator of mode k maps |1_k> -> |vac>, two-excitation states are cut.
ComplexMatrix truncated_hamiltonian(const TruncatedBath& tb, const JcConfig& cfg, double t) {
    const Eigen::Index db = tb.dims.d_bath;
    ComplexMatrix b = ComplexMatrix::Zero(db, db);
    for (std::size_t k = 0; k < tb.coupled.size(); ++k) {
        b(0, static_cast<Eigen::Index>(k + 1)) =
            tb.coupled[k].g * std::exp(Complex(0, -tb.coupled[k].omega * t));
    }
    const Complex sys_phase = std::exp(Complex(0, cfg.omega0 * t));
    ComplexMatrix h = kron(sys_phase * sigma_plus(), b);
    return h + ComplexMatrix(h.adjoint());
}

KernelValue project_onto_x0(const TruncatedBath& tb, const ComplexMatrix& result) {
    const Complex denom = linalg::hs_inner(tb.x0, tb.x0);
    const Complex scalar = linalg::hs_inner(tb.x0, result) / denom;
    const double residual = frobenius_norm(result - scalar * tb.x0);
    return KernelValue{scalar, residual};
}

KernelValue kernel_pll_impl(const TruncatedBath& tb, const JcConfig& cfg, double tau) {
    const ComplexMatrix ha = truncated_hamiltonian(tb, cfg, tau);
    const ComplexMatrix hb = truncated_hamiltonian(tb, cfg, 0.0);
    const ComplexMatrix r = superop::apply_projector_p(
        tb.bath, superop::apply_liouvillian(ha, superop::apply_liouvillian(hb, tb.x0)));
    return project_onto_x0(tb, r);
}

KernelValue kernel_pll_pdag_impl(const TruncatedBath& tb, const JcConfig& cfg, double tau) {
    const ComplexMatrix ha = truncated_hamiltonian(tb, cfg, tau);
    const ComplexMatrix hb = truncated_hamiltonian(tb, cfg, 0.0);
    const ComplexMatrix r = superop::apply_projector_p(
        tb.bath,
        superop::apply_liouvillian(
            ha, superop::apply_liouvillian(hb, superop::apply_projector_p_adjoint(tb.bath, tb.x0))));
    return project_onto_x0(tb, r);
}

struct ExtraTermTables {
    double h;
    std::vector<Complex> term_pp, term_pmid;
};

// Factorized 5-simplex integration of the two adjoint chains. The blocks
// between projectors reduce to the stationary kernels kappa1 (P L L P) and
// kappa2 (P L L Pdag); L L applied to x0 has no off-ray component on this
// truncation, which project_onto_x0's residual guards.
ExtraTermTables build_extra_tables(const JcConfig& cfg, int coupled_modes, int total_bath_dim,
                                   double t_end, double h) {
    const TruncatedBath tb = build_truncated(cfg, coupled_modes, total_bath_dim);
    const auto n = static_cast<std::size_t>(std::llround(t_end / h)) + 1;
    std::vector<Complex> k1(n), k2(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double tau = static_cast<double>(j) * h;
        const KernelValue v1 = kernel_pll_impl(tb, cfg, tau);
        const KernelValue v2 = kernel_pll_pdag_impl(tb, cfg, tau);
        if (v1.residual > 1e-10 || v2.residual > 1e-10) {
            throw Error("jc: truncated-bath kernel left the sigma_+ eigenoperator ray");
        }
        k1[j] = v1.value;
        k2[j] = v2.value;
    }

    // inner:  B(t3) = int int kappa1(t4 - t5)
    const std::vector<Complex> inner1 = cumulative_trapezoid(k1, h);
    const std::vector<Complex> b_arr = cumulative_trapezoid(inner1, h);
    // middle: A(t1) = int int kappa1(t2 - t3) B(t3)
    const std::vector<Complex> mid = convolve(k1, b_arr, h);
    const std::vector<Complex> a_arr = cumulative_trapezoid(mid, h);
    // outer:  kappa1 (with the Tr[I_B] factor) or kappa2 against A
    ExtraTermTables out;
    out.h = h;
    out.term_pp = convolve(k1, a_arr, h);
    for (Complex& v : out.term_pp) v *= static_cast<double>(total_bath_dim);
    out.term_pmid = convolve(k2, a_arr, h);
    return out;
}

}  // namespace

std::vector<Mode> adjoint_bath_modes(const JcConfig& cfg, int coupled_modes) {
    if (coupled_modes == 0) return {};
    JcConfig coarse = cfg;
    coarse.n_modes = coupled_modes;
    coarse.window = cfg.adjoint_window;
    return discretize_bath(coarse);
}

KernelValue kernel_pll(double tau, const JcConfig& cfg, int coupled_modes, int total_bath_dim) {
    validate(cfg);
    return kernel_pll_impl(build_truncated(cfg, coupled_modes, total_bath_dim), cfg, tau);
}

KernelValue kernel_pll_pdag(double tau, const JcConfig& cfg, int coupled_modes,
                            int total_bath_dim) {
    validate(cfg);
    return kernel_pll_pdag_impl(build_truncated(cfg, coupled_modes, total_bath_dim), cfg, tau);
}

JcExtraTerms tclplus_extra_terms6_padded(double t, const JcConfig& cfg, int coupled_modes,
                                         int total_bath_dim) {
    validate(cfg);
    if (t < 0) throw InvalidOrder("tclplus_extra_terms6: t must be >= 0");
    const double h = 0.5 * cfg.dt;
    const auto j = static_cast<std::size_t>(std::llround(t / h));
    const ExtraTermTables tables =
        build_extra_tables(cfg, coupled_modes, total_bath_dim, static_cast<double>(j) * h, h);
    return JcExtraTerms{tables.term_pp[j], tables.term_pmid[j]};
}

JcExtraTerms tclplus_extra_terms6(double t, const JcConfig& cfg, int truncated_bath_dim) {
    return tclplus_extra_terms6_padded(t, cfg, truncated_bath_dim - 1, truncated_bath_dim);
}

JcTrajectory run_jc(const JcConfig& cfg) {
    validate(cfg);
    if (cfg.method == Method::Exact) return exact_one_excitation(cfg);
    require_order(cfg.order);
    if (cfg.method == Method::TCLplus && cfg.order != 6) {
        throw InvalidOrder("run_jc: TCLplus is the order-6 construction here; use order = 6");
    }

    const double h = 0.5 * cfg.dt;
    const auto steps = static_cast<long>(std::llround(cfg.t_max / cfg.dt));
    const auto nhalf = static_cast<std::size_t>(2 * steps) + 1;
    const RateStack st = build_rate_stack(cfg, cfg.order, static_cast<double>(2 * steps) * h, h);

    std::vector<double> gamma(nhalf), shift(nhalf);
    for (std::size_t j = 0; j < nhalf; ++j) {
        const Complex r = rate_at(st, cfg, cfg.order, j);
        gamma[j] = r.real();
        shift[j] = r.imag();
    }
    if (cfg.method == Method::TCLplus) {
        const ExtraTermTables extra = build_extra_tables(
            cfg, cfg.bath_dim_cutoff - 1, cfg.bath_dim_cutoff, static_cast<double>(2 * steps) * h, h);
        const double l2 = cfg.lambda * cfg.lambda;
        const double l6 = l2 * l2 * l2;
        for (std::size_t j = 0; j < nhalf; ++j) {
            const Complex d = -2.0 * l6 * (extra.term_pp[j] + extra.term_pmid[j]);
            gamma[j] += d.real();
            shift[j] += d.imag();
        }
    }

    // K_S(t) rho = -i S/2 [n, rho] + gamma (s- rho s+ - 1/2 {n, rho}), n = s+ s-.
    const ComplexMatrix sp = sigma_plus(), sm = sigma_minus();
    const ComplexMatrix num = sp * sm;
    auto k_apply = [&](std::size_t j, const ComplexMatrix& rho) {
        return ComplexMatrix(Complex(0, -0.5 * shift[j]) * (num * rho - rho * num) +
                             gamma[j] * (sm * rho * sp - 0.5 * (num * rho + rho * num)));
    };

    const double c1 = cfg.initial_c1;
    const double c0 = std::sqrt(std::max(0.0, 1.0 - c1 * c1));
    ComplexMatrix rho(2, 2);
    rho << 1.0 - c1 * c1, c0 * c1, c0 * c1, c1 * c1;

    JcTrajectory traj;
    for (long i = 0; i <= steps; ++i) {
        traj.times.push_back(i * cfg.dt);
        traj.rho11.push_back(rho(1, 1).real());
        traj.coherence.push_back(rho(0, 1));
        traj.max_trace_drift =
            std::max(traj.max_trace_drift, std::abs(rho.trace() - Complex(1.0, 0.0)));
        traj.max_hermiticity_drift =
            std::max(traj.max_hermiticity_drift, frobenius_norm(rho - ComplexMatrix(rho.adjoint())));
        if (i == steps) break;
        const std::size_t j = static_cast<std::size_t>(2 * i);
        const ComplexMatrix k1 = k_apply(j, rho);
        const ComplexMatrix k2 = k_apply(j + 1, rho + (0.5 * cfg.dt) * k1);
        const ComplexMatrix k3 = k_apply(j + 1, rho + (0.5 * cfg.dt) * k2);
        const ComplexMatrix k4 = k_apply(j + 2, rho + cfg.dt * k3);
        rho += (cfg.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!rho.allFinite()) {
            traj.diverged_at = (i + 1) * cfg.dt;
            break;
        }
    }
    return traj;
}

}  // namespace tclplus::jc
