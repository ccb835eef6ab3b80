#include <doctest.h>

#include <cmath>

#include "tclplus/jaynes_cummings.hpp"

#include "tclplus/linalg.hpp"
#include "tclplus/rng.hpp"
#include "tclplus/superop.hpp"

using namespace tclplus;
using namespace tclplus::jc;

namespace {

JcConfig base_cfg() {
    JcConfig cfg;
    cfg.gamma0 = 10.0;
    cfg.omega0 = 1.0;
    cfg.nu_b = 1.0;
    cfg.lambda = 1.0;
    cfg.t_max = 2.0;
    cfg.dt = 1e-3;
    return cfg;
}

// Continuum closed form for the resonant Lorentzian kernel
// lambda^2 (gamma0 nu/2) e^{-nu tau}: the exact excited amplitude.
Complex continuum_c1(double t, const JcConfig& cfg) {
    const Complex d =
        std::sqrt(Complex(cfg.nu_b * cfg.nu_b -
                          2.0 * cfg.gamma0 * cfg.nu_b * cfg.lambda * cfg.lambda,
                          0.0));
    const Complex half = 0.5 * d * t;
    return std::exp(-0.5 * cfg.nu_b * t) *
           (std::cosh(half) + (cfg.nu_b / d) * std::sinh(half));
}

}  // namespace

TEST_CASE("bath_correlation: closed form vs direct quadrature of the density") {
    JcConfig cfg = base_cfg();
    for (double tau : {0.0, 0.3, 1.0, 2.5}) {
        // wide high-resolution quadrature oracle
        const double W = 2000.0, n = 4'000'000;
        const double dw = 2.0 * W / n;
        Complex acc(0, 0);
        for (long k = 0; k < n; ++k) {
            const double w = cfg.omega0 - W + (k + 0.5) * dw;
            const double x = (w - cfg.omega0) / cfg.nu_b;
            const double j = cfg.gamma0 / (2.0 * M_PI) / (1.0 + x * x);
            acc += j * std::exp(Complex(0, (cfg.omega0 - w) * tau)) * dw;
        }
        const Complex closed = bath_correlation(tau, cfg);
        CHECK(std::abs(closed - acc) / std::abs(closed) < 2e-3);
    }
    CHECK(bath_correlation(0.0, cfg).real() ==
          doctest::Approx(0.5 * cfg.gamma0 * cfg.nu_b));
    const Complex f = bath_correlation(0.7, cfg);
    CHECK(std::abs(bath_correlation(-0.7, cfg) - std::conj(f)) < 1e-15);
}

TEST_CASE("discretize_bath: discrete correlation approximates the continuum") {
    auto worst_error = [](const JcConfig& cfg) {
        auto modes = discretize_bath(cfg);
        double worst = 0;
        for (double tau = 0.0; tau <= 3.0 / cfg.nu_b; tau += 0.05) {
            const Complex fd = discrete_correlation(modes, cfg.omega0, tau);
            const Complex fc = bath_correlation(tau, cfg);
            worst = std::max(worst, std::abs(fd - fc) / std::abs(fc));
            // symmetric grid about resonance: imaginary part cancels
            CHECK(std::abs(fd.imag()) < 1e-12);
        }
        return worst;
    };
    // default grid: sub-1% over tau in [0, 3/nu]
    JcConfig cfg = base_cfg();
    REQUIRE(static_cast<int>(discretize_bath(cfg).size()) == cfg.n_modes);
    CHECK(worst_error(cfg) < 0.01);
    // a +-12 nu window cannot do better than the ~5% Lorentzian tail mass it
    // discards, however many modes are used
    JcConfig narrow = cfg;
    narrow.window = 12.0;
    narrow.n_modes = 400;
    const double floor400 = worst_error(narrow);
    narrow.n_modes = 4000;
    const double floor4000 = worst_error(narrow);
    CHECK(floor400 > 0.04);
    CHECK(floor4000 > 0.04);
    CHECK(floor400 < 0.07);
}

TEST_CASE("discretize_bath: a single resonant mode gives a flat correlation") {
    JcConfig cfg = base_cfg();
    cfg.n_modes = 1;
    auto modes = discretize_bath(cfg);
    const Complex f0 = discrete_correlation(modes, cfg.omega0, 0.0);
    const Complex f1 = discrete_correlation(modes, cfg.omega0, 2.0);
    CHECK(std::abs(f0 - f1) < 1e-12);
    CHECK(f0.real() == doctest::Approx(modes[0].g * modes[0].g));
}

TEST_CASE("exact_one_excitation: frozen at zero coupling and unit trace") {
    JcConfig cfg = base_cfg();
    cfg.lambda = 0.0;
    cfg.dt = 0.01;
    JcTrajectory traj = exact_one_excitation(cfg);
    for (double r : traj.rho11) CHECK(r == doctest::Approx(1.0));
}

TEST_CASE("exact_one_excitation: matches the continuum closed form at strong coupling") {
    JcConfig cfg = base_cfg();
    cfg.n_modes = 1200;
    cfg.window = 40.0;
    cfg.dt = 5e-4;
    JcTrajectory traj = exact_one_excitation(cfg);
    double worst = 0;
    for (std::size_t i = 0; i < traj.times.size(); i += 100) {
        const double expected = std::norm(continuum_c1(traj.times[i], cfg));
        worst = std::max(worst, std::abs(traj.rho11[i] - expected));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("exact_one_excitation: strong coupling drives rho11 through zero") {
    JcConfig cfg = base_cfg();
    cfg.dt = 5e-4;
    JcTrajectory traj = exact_one_excitation(cfg);
    double min_rho = 1.0;
    bool revived = false;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        min_rho = std::min(min_rho, traj.rho11[i]);
        if (min_rho < 1e-3 && traj.rho11[i] > 0.05) revived = true;
        CHECK(traj.rho11[i] >= -1e-12);
        CHECK(traj.rho11[i] <= 1.0 + 1e-12);
    }
    CHECK(min_rho < 1e-3);
    CHECK(revived);
}

TEST_CASE("tcl_rates: zero at t = 0 and the order-2 closed form at resonance") {
    JcConfig cfg = base_cfg();
    cfg.dt = 0.01;
    RateValue r0 = tcl_rates(2, 0.0, cfg);
    CHECK(r0.gamma == doctest::Approx(0.0));
    CHECK(r0.s == doctest::Approx(0.0));

    // gamma_2(t) = lambda^2 gamma0 (1 - e^{-nu t}) for the exponential
    // correlation; the discretized bath tracks it to its own 1% accuracy.
    for (double t : {0.3, 1.0, 2.0}) {
        RateValue r = tcl_rates(2, t, cfg);
        const double expected =
            cfg.lambda * cfg.lambda * cfg.gamma0 * (1.0 - std::exp(-cfg.nu_b * t));
        CHECK(std::abs(r.gamma - expected) / expected < 0.01);
        CHECK(std::abs(r.s) < 0.01 * expected);  // resonance: no Lamb shift
    }
}

TEST_CASE("tcl_rates: the order-4 correction grows as t^3 at small t") {
    JcConfig cfg = base_cfg();
    cfg.dt = 2e-3;
    auto gamma4 = [&](double t) {
        return tcl_rates(4, t, cfg).gamma - tcl_rates(2, t, cfg).gamma;
    };
    const double g_small = gamma4(0.05);
    const double g_double = gamma4(0.10);
    CHECK(std::abs(g_double / g_small) == doctest::Approx(8.0).epsilon(0.15));
}

TEST_CASE("tcl_rates: grid halving converges at second order") {
    JcConfig cfg = base_cfg();
    const double t = 1.5;
    auto rate_with_dt = [&](double dt) {
        JcConfig c = cfg;
        c.dt = dt;
        return tcl_rates(6, t, c).gamma;
    };
    const double r1 = rate_with_dt(0.02);
    const double r2 = rate_with_dt(0.01);
    const double r3 = rate_with_dt(0.005);
    const double ratio = (r1 - r2) / (r2 - r3);
    CHECK(ratio > 2.5);
    CHECK(ratio < 7.0);
}

TEST_CASE("tcl_rates: order-6 truncation error scales as lambda^8 against the "
          "discrete exact rate") {
    JcConfig cfg = base_cfg();
    cfg.n_modes = 60;  // small bath keeps the ODE cheap and identical on both sides
    cfg.window = 8.0;
    cfg.dt = 4e-3;
    const double t = 0.9;
    auto modes = discretize_bath(cfg);

    auto exact_rate = [&](double lambda) {
        JcConfig c = cfg;
        c.lambda = lambda;
        c.t_max = t;
        // integrate the amplitude ODE and read off -2 Re[c1'/c1]
        const int nm = c.n_modes;
        ComplexVector y = ComplexVector::Zero(nm + 1);
        y(0) = 1.0;
        auto deriv = [&](double s, const ComplexVector& v) {
            ComplexVector d = ComplexVector::Zero(nm + 1);
            Complex acc(0, 0);
            for (int k = 0; k < nm; ++k) {
                const Complex ph = std::exp(Complex(0, (c.omega0 - modes[k].omega) * s));
                acc += modes[k].g * ph * v(k + 1);
                d(k + 1) = Complex(0, -c.lambda) * modes[k].g * std::conj(ph) * v(0);
            }
            d(0) = Complex(0, -c.lambda) * acc;
            return d;
        };
        const long steps = std::llround(t / c.dt);
        for (long i = 0; i < steps; ++i) {
            const double s = i * c.dt;
            const ComplexVector k1 = deriv(s, y);
            const ComplexVector k2 = deriv(s + 0.5 * c.dt, y + (0.5 * c.dt) * k1);
            const ComplexVector k3 = deriv(s + 0.5 * c.dt, y + (0.5 * c.dt) * k2);
            const ComplexVector k4 = deriv(s + c.dt, y + c.dt * k3);
            y += (c.dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        const Complex c1dot = deriv(t, y)(0);
        return -2.0 * (c1dot / y(0)).real();
    };

    std::vector<double> errs;
    for (double lambda : {0.20, 0.10, 0.05}) {
        JcConfig c = cfg;
        c.lambda = lambda;
        errs.push_back(std::abs(tcl_rates(6, t, c).gamma - exact_rate(lambda)));
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    CHECK(order1 > 7.0);
    CHECK(order1 < 9.0);
    // the last halving runs into the quadrature floor; it may only shrink
    CHECK(errs[2] < errs[1]);
}

TEST_CASE("kernels: direct superoperator evaluation matches the analytic reduction") {
    // P L(t) L(0) on sigma_+ (x) |vac><vac| gives -f_sel(t); inserting Pdag
    // doubles it. Both are stationary.
    JcConfig cfg = base_cfg();
    const auto modes = adjoint_bath_modes(cfg, 2);
    for (double tau : {0.0, 0.4, 1.3}) {
        Complex fsel(0, 0);
        for (const Mode& m : modes) {
            fsel += m.g * m.g * std::exp(Complex(0, (cfg.omega0 - m.omega) * tau));
        }
        const KernelValue k1 = kernel_pll(tau, cfg, 2, 3);
        const KernelValue k2 = kernel_pll_pdag(tau, cfg, 2, 3);
        CHECK(k1.residual < 1e-12);
        CHECK(k2.residual < 1e-12);
        CHECK(std::abs(k1.value + fsel) < 1e-12);
        CHECK(std::abs(k2.value + 2.0 * fsel) < 1e-12);
    }
}

TEST_CASE("kernels: stationarity under a common time shift") {
    JcConfig cfg = base_cfg();
    const auto modes = adjoint_bath_modes(cfg, 2);
    // hand-built chain at (s + tau, s) on the same truncated space
    superop::SpaceDims dims{2, 3};
    ComplexMatrix vac = ComplexMatrix::Zero(3, 3);
    vac(0, 0) = 1.0;
    superop::BathState bath = superop::make_bath_state(dims, vac);
    ComplexMatrix x0 = kron(sigma_plus(), vac);
    auto hamiltonian = [&](double t) {
        ComplexMatrix b = ComplexMatrix::Zero(3, 3);
        for (int k = 0; k < 2; ++k) {
            b(0, k + 1) = modes[static_cast<std::size_t>(k)].g *
                          std::exp(Complex(0, -modes[static_cast<std::size_t>(k)].omega * t));
        }
        ComplexMatrix h = kron(ComplexMatrix(std::exp(Complex(0, cfg.omega0 * t)) * sigma_plus()), b);
        return ComplexMatrix(h + ComplexMatrix(h.adjoint()));
    };
    const double tau = 0.8;
    for (double s : {0.0, 0.7, 1.9}) {
        const ComplexMatrix r = superop::apply_projector_p(
            bath, superop::apply_liouvillian(
                      hamiltonian(s + tau),
                      superop::apply_liouvillian(hamiltonian(s), x0)));
        const Complex val = linalg::hs_inner(x0, r) / linalg::hs_inner(x0, x0);
        CHECK(std::abs(val - kernel_pll(tau, cfg, 2, 3).value) < 1e-12);
    }
}

TEST_CASE("projector sandwiches vanish for the truncated cavity Hamiltonian") {
    // B rho_B = 0 for the vacuum reference and the bath operators are
    // traceless, so all three sandwiches collapse at any truncation.
    JcConfig cfg = base_cfg();
    const auto modes = adjoint_bath_modes(cfg, 2);
    superop::SpaceDims dims{2, 3};
    ComplexMatrix vac = ComplexMatrix::Zero(3, 3);
    vac(0, 0) = 1.0;
    superop::BathState bath = superop::make_bath_state(dims, vac);
    for (double t : {0.0, 0.9}) {
        ComplexMatrix b = ComplexMatrix::Zero(3, 3);
        for (int k = 0; k < 2; ++k) {
            b(0, k + 1) = modes[static_cast<std::size_t>(k)].g *
                          std::exp(Complex(0, -modes[static_cast<std::size_t>(k)].omega * t));
        }
        ComplexMatrix h =
            kron(ComplexMatrix(std::exp(Complex(0, cfg.omega0 * t)) * sigma_plus()), b);
        h += ComplexMatrix(h.adjoint());
        const auto report = superop::plp_relations_check(h, bath);
        CHECK(report.p_l_p < 1e-10);
        CHECK(report.pdag_ldag_pdag < 1e-10);
        CHECK(report.pdag_l_p < 1e-10);   // pure reference state
        CHECK(report.p_l_pdag < 1e-10);   // traceless bath operators
    }
}

TEST_CASE("tclplus_extra_terms6: magnitude strictly increases with the bath dimension") {
    JcConfig cfg = base_cfg();
    cfg.dt = 0.01;
    const double t = 1.0;
    const double m1 = std::abs(tclplus_extra_terms6(t, cfg, 1).total());
    const double m3 = std::abs(tclplus_extra_terms6(t, cfg, 3).total());
    const double m7 = std::abs(tclplus_extra_terms6(t, cfg, 7).total());
    CHECK(m1 < m3);
    CHECK(m3 < m7);
    CHECK(m1 == doctest::Approx(0.0));  // no coupled modes at dimension 1
}

TEST_CASE("tclplus_extra_terms6: the P Pdag term is exactly proportional to Tr[I_B]") {
    JcConfig cfg = base_cfg();
    cfg.dt = 0.01;
    const double t = 1.2;
    const JcExtraTerms d3 = tclplus_extra_terms6_padded(t, cfg, 2, 3);
    const JcExtraTerms d6 = tclplus_extra_terms6_padded(t, cfg, 2, 6);
    CHECK(std::abs(d6.term_pp / d3.term_pp - 2.0) < 1e-6);
    CHECK(std::abs(d6.term_pmid - d3.term_pmid) < 1e-12 * std::abs(d3.term_pmid) + 1e-15);
}

TEST_CASE("run_jc: Exact delegates to the sector solution") {
    JcConfig cfg = base_cfg();
    cfg.dt = 0.01;
    cfg.method = Method::Exact;
    JcTrajectory a = run_jc(cfg);
    JcTrajectory b = exact_one_excitation(cfg);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        CHECK(a.rho11[i] == doctest::Approx(b.rho11[i]));
    }
}

TEST_CASE("run_jc: order-2 rates track the exact solution at weak coupling") {
    JcConfig cfg = base_cfg();
    cfg.lambda = 0.1;
    cfg.dt = 2e-3;
    cfg.t_max = 2.0;
    cfg.method = Method::Exact;
    JcTrajectory exact = run_jc(cfg);
    cfg.method = Method::TCL;
    cfg.order = 2;
    JcTrajectory tcl = run_jc(cfg);
    double worst = 0;
    for (std::size_t i = 0; i < exact.times.size(); ++i) {
        worst = std::max(worst, std::abs(exact.rho11[i] - tcl.rho11[i]));
    }
    CHECK(worst < 0.01);
}

TEST_CASE("run_jc: trace and Hermiticity drift stay at roundoff") {
    JcConfig cfg = base_cfg();
    cfg.lambda = 0.4;
    cfg.dt = 2e-3;
    cfg.initial_c1 = 0.8;  // nontrivial coherence
    for (int order : {2, 4, 6}) {
        cfg.method = Method::TCL;
        cfg.order = order;
        JcTrajectory traj = run_jc(cfg);
        CHECK(traj.max_trace_drift < 1e-10);
        CHECK(traj.max_hermiticity_drift < 1e-10);
        // coherence evolves but never exceeds the Bloch ball
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            CHECK(std::abs(traj.coherence[i]) <= 0.5 + 1e-9);
        }
    }
}

TEST_CASE("run_jc: TCLplus requires order 6 and reduces to TCL6 at bath dimension 1") {
    JcConfig cfg = base_cfg();
    cfg.dt = 5e-3;
    cfg.method = Method::TCLplus;
    cfg.order = 4;
    CHECK_THROWS_AS(run_jc(cfg), InvalidOrder);

    cfg.order = 6;
    cfg.bath_dim_cutoff = 1;
    JcTrajectory plus = run_jc(cfg);
    cfg.method = Method::TCL;
    JcTrajectory tcl = run_jc(cfg);
    for (std::size_t i = 0; i < plus.times.size(); ++i) {
        CHECK(plus.rho11[i] == doctest::Approx(tcl.rho11[i]));
    }
}

TEST_CASE("run_jc: the TCLplus correction scales as lambda^6") {
    JcConfig cfg = base_cfg();
    cfg.t_max = 1.0;
    cfg.dt = 5e-3;
    cfg.order = 6;
    cfg.bath_dim_cutoff = 3;
    auto gap = [&](double lambda) {
        JcConfig c = cfg;
        c.lambda = lambda;
        c.method = Method::TCL;
        const JcTrajectory tcl = run_jc(c);
        c.method = Method::TCLplus;
        const JcTrajectory plus = run_jc(c);
        double g = 0;
        for (std::size_t i = 0; i < tcl.rho11.size(); ++i) {
            g = std::max(g, std::abs(tcl.rho11[i] - plus.rho11[i]));
        }
        return g;
    };
    const double g1 = gap(0.2);
    const double g2 = gap(0.1);
    // the grade-6 correction is the only difference between the methods
    CHECK(std::log2(g1 / g2) == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("run_jc: lambda = 0 trajectories are constant for every method") {
    JcConfig cfg = base_cfg();
    cfg.lambda = 0.0;
    cfg.dt = 0.01;
    for (auto setup : {std::pair<Method, int>{Method::Exact, 2},
                       {Method::TCL, 6},
                       {Method::TCLplus, 6}}) {
        cfg.method = setup.first;
        cfg.order = setup.second;
        cfg.bath_dim_cutoff = 3;
        JcTrajectory traj = run_jc(cfg);
        for (double r : traj.rho11) CHECK(r == doctest::Approx(1.0));
    }
}
