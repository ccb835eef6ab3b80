#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "tclplus/ising.hpp"
#include "tclplus/linalg.hpp"
#include "tclplus/rng.hpp"
#include "tclplus/superop.hpp"

using namespace tclplus;
using namespace tclplus::ising;

namespace {

IsingConfig random_cfg(int n, double beta, std::uint64_t seed) {
    IsingConfig cfg;
    cfg.n_bath = n;
    cfg.beta = beta;
    Rng rng(seed);
    cfg.couplings.resize(n);
    cfg.omegas.resize(n);
    for (double& g : cfg.couplings) g = rng.uniform(0.3, 1.2);
    for (double& o : cfg.omegas) o = rng.uniform(0.4, 1.5);
    return cfg;
}

double max_vx_deviation(const BlochTrajectory& a, const BlochTrajectory& b) {
    double dev = 0;
    for (std::size_t i = 0; i < a.times.size(); ++i) {
        dev = std::max(dev, std::abs(a.vx[i] - b.vx[i]));
    }
    return dev;
}

}  // namespace

TEST_CASE("bath_moments: infinite temperature kills the odd structure") {
    IsingConfig cfg = random_cfg(5, 0.0, 11);
    BathMoments m = bath_moments(cfg);
    CHECK(m.theta == doctest::Approx(0.0));
    CHECK(m.tr_b == doctest::Approx(0.0));
    CHECK(m.q[3] == doctest::Approx(0.0));
    CHECK(m.q[5] == doctest::Approx(0.0));
    double sum_g2 = 0;
    for (double g : cfg.couplings) sum_g2 += g * g;
    CHECK(m.q[2] == doctest::Approx(sum_g2).epsilon(1e-12));
}

TEST_CASE("bath_moments: N = 1 trace of B") {
    IsingConfig cfg;
    cfg.n_bath = 1;
    cfg.couplings = {1.0};
    cfg.omegas = {1.0};
    cfg.beta = 0.8;
    const double b1 = std::tanh(-0.5 * 0.8);
    BathMoments m = bath_moments(cfg);
    CHECK(m.tr_b == doctest::Approx(-2.0 * b1).epsilon(1e-13));
}

TEST_CASE("bath_moments: closed forms match dense traces for N <= 4") {
    for (int n = 1; n <= 4; ++n) {
        IsingConfig cfg = random_cfg(n, 1.3, 20 + static_cast<std::uint64_t>(n));
        BathMoments m = bath_moments(cfg);
        const ComplexMatrix rho = gibbs_bath_matrix(cfg);
        const ComplexMatrix b = bath_operator_matrix(cfg);

        CHECK(std::abs(rho.trace().real() - 1.0) < 1e-13);
        const double theta_direct =
            ((bath_operator_matrix(cfg) + m.theta * ComplexMatrix::Identity(b.rows(), b.cols())) *
             rho)
                .trace()
                .real();
        CHECK(m.theta == doctest::Approx(theta_direct).epsilon(1e-10));

        // Q_n = Tr[B^n rho]
        ComplexMatrix bn = ComplexMatrix::Identity(b.rows(), b.cols());
        for (int k = 1; k <= 5; ++k) {
            bn = (bn * b).eval();
            const double direct = (bn * rho).trace().real();
            if (k == 1) {
                CHECK(std::abs(direct) < 1e-12);
            } else {
                CHECK(m.q[k] == doctest::Approx(direct).epsilon(1e-10));
            }
        }
        CHECK(m.tr_b == doctest::Approx(b.trace().real()).epsilon(1e-10));
        const double t2_direct = (b * b * rho * rho).trace().real();
        CHECK(m.tr_b2_rho2 == doctest::Approx(t2_direct).epsilon(1e-10));
        const double brho2_direct = (b * rho * b * rho).trace().real();
        CHECK(m.tr_brho_sq == doctest::Approx(brho2_direct).epsilon(1e-10));
        CHECK(m.tr_b2_rho2 == doctest::Approx(m.tr_brho_sq).epsilon(1e-13));
    }
}

TEST_CASE("exact_dephasing: lambda = 0 freezes the Bloch vector") {
    IsingConfig cfg = random_cfg(3, 1.0, 31);
    cfg.lambda = 0.0;
    cfg.initial_bloch = {0.4, -0.5, 0.6};
    BlochTrajectory traj = exact_dephasing(cfg);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(traj.vx[i] == doctest::Approx(0.4));
        CHECK(traj.vy[i] == doctest::Approx(-0.5));
        CHECK(traj.vz[i] == doctest::Approx(0.6));
    }
}

TEST_CASE("exact_dephasing: matches dense unitary conjugation for N <= 4") {
    for (int n = 1; n <= 4; ++n) {
        IsingConfig cfg = random_cfg(n, 0.9, 40 + static_cast<std::uint64_t>(n));
        cfg.lambda = 0.35;
        cfg.t_max = 2.0;
        cfg.dt = 0.25;
        cfg.initial_bloch = {0.8, 0.3, 0.2};
        BlochTrajectory traj = exact_dephasing(cfg);

        const ComplexMatrix h = kron(pauli_z(), bath_operator_matrix(cfg));
        const ComplexMatrix rho0 =
            kron(0.5 * (ComplexMatrix::Identity(2, 2) + 0.8 * pauli_x() + 0.3 * pauli_y() +
                        0.2 * pauli_z()),
                 gibbs_bath_matrix(cfg));
        superop::SpaceDims dims{2, Eigen::Index(1) << n};
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            const ComplexMatrix u = ComplexMatrix(Complex(0, -cfg.lambda * traj.times[i]) * h).exp();
            const ComplexMatrix rho_s =
                superop::partial_trace_bath(ComplexMatrix(u * rho0 * u.adjoint()), dims);
            const double vx = (pauli_x() * rho_s).trace().real();
            const double vy = (pauli_y() * rho_s).trace().real();
            const double vz = (pauli_z() * rho_s).trace().real();
            CHECK(std::abs(traj.vx[i] - vx) < 1e-10);
            CHECK(std::abs(traj.vy[i] - vy) < 1e-10);
            CHECK(std::abs(traj.vz[i] - vz) < 1e-10);
        }
    }
}

TEST_CASE("exact_dephasing: matches brute_force_dephasing for N in 1..6") {
    for (int n = 1; n <= 6; ++n) {
        IsingConfig cfg = random_cfg(n, 1.1, 50 + static_cast<std::uint64_t>(n));
        cfg.lambda = 0.4;
        cfg.t_max = 3.0;
        cfg.dt = 0.05;
        cfg.initial_bloch = {0.6, -0.7, 0.25};
        BlochTrajectory a = exact_dephasing(cfg);
        BlochTrajectory b = brute_force_dephasing(cfg);
        for (std::size_t i = 0; i < a.times.size(); ++i) {
            CHECK(std::abs(a.vx[i] - b.vx[i]) < 1e-10);
            CHECK(std::abs(a.vy[i] - b.vy[i]) < 1e-10);
            CHECK(std::abs(a.vz[i] - b.vz[i]) < 1e-10);
        }
    }
    IsingConfig big = random_cfg(13, 1.0, 60);
    CHECK_THROWS_AS(brute_force_dephasing(big), CapacityError);
}

TEST_CASE("exact_dephasing: stays inside the Bloch ball") {
    IsingConfig cfg = random_cfg(5, 1.7, 63);
    cfg.lambda = 0.4;
    cfg.initial_bloch = {0.6, 0.5, 0.4};
    BlochTrajectory traj = exact_dephasing(cfg);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double r2 = traj.vx[i] * traj.vx[i] + traj.vy[i] * traj.vy[i] +
                          traj.vz[i] * traj.vz[i];
        CHECK(r2 <= 1.0 + 1e-9);
    }
}

TEST_CASE("exact_dephasing: nearly pure bath only rotates the coherence") {
    IsingConfig cfg = random_cfg(4, 500.0, 61);
    cfg.lambda = 0.3;
    BlochTrajectory traj = exact_dephasing(cfg);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double amp = std::hypot(traj.vx[i], traj.vy[i]);
        CHECK(amp == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("tcl_fg: t = 0 and the infinite-temperature phase") {
    IsingConfig cfg = random_cfg(4, 0.0, 71);
    BathMoments m = bath_moments(cfg);
    for (int order : {2, 4, 5}) {
        FgValue fg = tcl_fg(order, 0.0, m, cfg);
        CHECK(fg.f == doctest::Approx(1.0));
        CHECK(fg.g == doctest::Approx(0.0));
        // beta = 0: all odd moments vanish, g stays 0 at every order
        FgValue fg2 = tcl_fg(order, 1.7, m, cfg);
        CHECK(fg2.g == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS(tcl_fg(3, 1.0, m, cfg), InvalidOrder);
}

TEST_CASE("tcl_fg: small lambda-t amplitude matches the exact second order") {
    IsingConfig cfg = random_cfg(4, 1.2, 81);
    cfg.lambda = 1e-3;
    BathMoments m = bath_moments(cfg);
    const double t = 1.0;
    BlochTrajectory exact = exact_dephasing(cfg);
    // 1 - f ~ 2 Q2 l^2 t^2
    const FgValue fg = tcl_fg(2, t, m, cfg);
    const double predicted = 2.0 * m.q[2] * cfg.lambda * cfg.lambda * t * t;
    CHECK(1.0 - fg.f == doctest::Approx(predicted).epsilon(1e-4));
    // and the exact amplitude agrees at this order
    std::size_t idx = static_cast<std::size_t>(std::llround(t / cfg.dt));
    const double amp = std::hypot(exact.vx[idx], exact.vy[idx]);
    CHECK(1.0 - amp == doctest::Approx(predicted).epsilon(1e-3));
}

TEST_CASE("tcl_fg: the t^5 phase coefficient is pinned by the exact solution") {
    IsingConfig cfg = random_cfg(5, 1.4, 91);
    const std::vector<double> pol = site_polarizations(cfg);
    BathMoments m = bath_moments(cfg);

    // Exact phase as a function of x = lambda t (lambda folded):
    // phi(x) = -2 theta x + sum_n arctan(beta_n tan(2 g_n x)); odd in x, the
    // linear terms cancel, phi = c3 x^3 + c5 x^5 + ...
    auto phi = [&](double x) {
        double v = -2.0 * m.theta * x;
        for (int n = 0; n < cfg.n_bath; ++n) {
            v += std::atan(pol[n] * std::tan(2.0 * cfg.couplings[n] * x));
        }
        return v;
    };
    // Implemented phase is -g; subtract the known x^3 part and Richardson the
    // x^5 coefficient out of the remainder.
    const double c3 = -(4.0 / 3.0) * m.q[3];
    auto c5_est = [&](double h) { return (phi(h) - c3 * h * h * h) / (h * h * h * h * h); };
    const double h = 0.04;
    const double c5 = (4.0 * c5_est(0.5 * h) - c5_est(h)) / 3.0;

    const double implemented = (1.0 / 60.0) * (-16.0 * m.q[5] + 160.0 * m.q[2] * m.q[3]);
    CHECK(-implemented == doctest::Approx(c5).epsilon(1e-4));
    // the doubled (2/60) variant misses by a factor of two
    CHECK(std::abs(-2.0 * implemented - c5) > 0.4 * std::abs(c5));
}

TEST_CASE("tclplus_term5_scalar: matches direct superoperator evaluation for N <= 4") {
    for (int n = 1; n <= 4; ++n) {
        IsingConfig cfg = random_cfg(n, 1.2, 100 + static_cast<std::uint64_t>(n));
        BathMoments m = bath_moments(cfg);
        superop::SpaceDims dims{2, Eigen::Index(1) << n};
        superop::BathState bath = superop::make_bath_state(dims, gibbs_bath_matrix(cfg));
        const ComplexMatrix h = kron(pauli_z(), bath_operator_matrix(cfg));

        Rng rng(200 + static_cast<std::uint64_t>(n));
        const ComplexMatrix rho_s = rng.density_matrix(2);
        const ComplexMatrix rho = kron(rho_s, bath.rho_b);

        // 2 P L Pdag L L P L L P applied right-to-left
        ComplexMatrix x = superop::apply_projector_p(bath, rho);
        x = superop::apply_liouvillian(h, x);
        x = superop::apply_liouvillian(h, x);
        x = superop::apply_projector_p(bath, x);
        x = superop::apply_liouvillian(h, x);
        x = superop::apply_liouvillian(h, x);
        x = superop::apply_projector_p_adjoint(bath, x);
        x = superop::apply_liouvillian(h, x);
        x = superop::apply_projector_p(bath, x);
        x *= 2.0;

        const ComplexMatrix commutator = pauli_z() * rho_s - rho_s * pauli_z();
        const ComplexMatrix expected = kron(ComplexMatrix(tclplus_term5_scalar(m) * commutator),
                                            bath.rho_b);
        CHECK(frobenius_norm(x - expected) / frobenius_norm(expected) < 1e-8);
    }
}

TEST_CASE("tclplus_term5_scalar: dense superoperator route agrees at N = 2") {
    IsingConfig cfg = random_cfg(2, 0.9, 120);
    BathMoments m = bath_moments(cfg);
    expansion::TimeDependentModel model = joint_model(cfg);
    const ComplexMatrix p = superop::projector_p(model.bath).mat;
    const ComplexMatrix pd = superop::projector_p_adjoint(model.bath).mat;
    const ComplexMatrix l = superop::liouvillian(model.hamiltonian(0.0), model.dims).mat;
    const ComplexMatrix chain = 2.0 * p * l * pd * l * l * p * l * l * p;

    Rng rng(121);
    const ComplexMatrix rho_s = rng.density_matrix(2);
    const ComplexVector out = chain * superop::vectorize(kron(rho_s, model.bath.rho_b));
    const ComplexMatrix commutator = pauli_z() * rho_s - rho_s * pauli_z();
    const ComplexVector expected = superop::vectorize(
        kron(ComplexMatrix(tclplus_term5_scalar(m) * commutator), model.bath.rho_b));
    CHECK((out - expected).norm() / expected.norm() < 1e-10);
}

TEST_CASE("tclplus_extra_term5: infinite temperature kills the correction, doubling N "
          "brings at least 2^N") {
    IsingConfig hot = random_cfg(4, 0.0, 130);
    BathMoments mh = bath_moments(hot);
    CHECK(tclplus_extra_term5(mh, 2.0, hot) == doctest::Approx(0.0));

    // identical per-site parameters, N and 2N
    IsingConfig a, b;
    a.n_bath = 3;
    a.couplings.assign(3, 0.8);
    a.omegas.assign(3, 0.9);
    a.beta = 1.1;
    b = a;
    b.n_bath = 6;
    b.couplings.assign(6, 0.8);
    b.omegas.assign(6, 0.9);
    const Complex sa = tclplus_term5_scalar(bath_moments(a));
    const Complex sb = tclplus_term5_scalar(bath_moments(b));
    CHECK(std::abs(sb) / std::abs(sa) >= 8.0);  // 2^(6-3)
}

TEST_CASE("run_ising: vz constant for every method, TCLplus needs order 5") {
    IsingConfig cfg = random_cfg(3, 1.0, 140);
    cfg.initial_bloch = {0.5, 0.5, 0.5};
    cfg.order = 5;
    for (Method m : {Method::Exact, Method::BruteForce, Method::TCL, Method::TCLplus}) {
        cfg.method = m;
        BlochTrajectory traj = run_ising(cfg);
        for (double vz : traj.vz) CHECK(vz == doctest::Approx(0.5));
    }
    cfg.method = Method::TCLplus;
    cfg.order = 4;
    CHECK_THROWS_AS(run_ising(cfg), InvalidOrder);
}

TEST_CASE("run_ising: TCL5 and TCLplus5 share the amplitude exactly") {
    IsingConfig cfg = default_config(4, 1.0);
    cfg.order = 5;
    cfg.method = Method::TCL;
    BlochTrajectory tcl = run_ising(cfg);
    cfg.method = Method::TCLplus;
    BlochTrajectory plus = run_ising(cfg);
    for (std::size_t i = 0; i < tcl.times.size(); ++i) {
        const double amp_tcl = std::hypot(tcl.vx[i], tcl.vy[i]);
        const double amp_plus = std::hypot(plus.vx[i], plus.vy[i]);
        CHECK(std::abs(amp_tcl - amp_plus) < 1e-12);
    }
}

TEST_CASE("run_ising: the extra phase term costs accuracy against the exact solution") {
    IsingConfig cfg = default_config(4, 1.0);
    cfg.order = 5;
    cfg.method = Method::Exact;
    BlochTrajectory exact = run_ising(cfg);
    cfg.method = Method::TCL;
    BlochTrajectory tcl = run_ising(cfg);
    cfg.method = Method::TCLplus;
    BlochTrajectory plus = run_ising(cfg);
    CHECK(max_vx_deviation(plus, exact) > max_vx_deviation(tcl, exact));
}

TEST_CASE("commutator binomial identity for a self-commuting Hamiltonian") {
    // [H, [H, ..., [H, x]]] = sum_k (-1)^k C(n,k) H^{n-k} x H^k
    IsingConfig cfg = random_cfg(2, 1.0, 150);
    const ComplexMatrix h = kron(pauli_z(), bath_operator_matrix(cfg));
    Rng rng(151);
    const ComplexMatrix x = rng.ginibre(8, 8);
    ComplexMatrix nested = x;
    for (int n = 1; n <= 6; ++n) {
        nested = (h * nested - nested * h).eval();
        ComplexMatrix direct = ComplexMatrix::Zero(8, 8);
        double binom = 1.0;
        for (int k = 0; k <= n; ++k) {
            ComplexMatrix hl = ComplexMatrix::Identity(8, 8);
            for (int i = 0; i < n - k; ++i) hl = (hl * h).eval();
            ComplexMatrix hr = ComplexMatrix::Identity(8, 8);
            for (int i = 0; i < k; ++i) hr = (hr * h).eval();
            direct += ((k % 2 == 0) ? binom : -binom) * hl * x * hr;
            binom = binom * (n - k) / (k + 1);
        }
        CHECK(frobenius_norm(nested - direct) / std::max(1.0, frobenius_norm(nested)) < 1e-10);
    }
}

TEST_CASE("odd/even structure of the reduced nested commutators") {
    IsingConfig cfg = random_cfg(3, 1.3, 160);
    const ComplexMatrix h = kron(pauli_z(), bath_operator_matrix(cfg));
    const ComplexMatrix rho_b = gibbs_bath_matrix(cfg);
    Rng rng(161);
    const ComplexMatrix rho_s = rng.density_matrix(2);
    superop::SpaceDims dims{2, 8};

    const ComplexMatrix odd_basis = pauli_z() * rho_s - rho_s * pauli_z();
    const ComplexMatrix even_basis = pauli_z() * rho_s * pauli_z() - rho_s;

    ComplexMatrix nested = kron(rho_s, rho_b);
    for (int n = 1; n <= 5; ++n) {
        nested = (h * nested - nested * h).eval();
        const ComplexMatrix reduced = superop::partial_trace_bath(nested, dims);
        const ComplexMatrix& basis = (n % 2 == 1) ? odd_basis : even_basis;
        const Complex coeff = linalg::hs_inner(basis, reduced) / linalg::hs_inner(basis, basis);
        CHECK(frobenius_norm(reduced - coeff * basis) < 1e-10);
    }
}

TEST_CASE("run_ising: TCL2 error scales as lambda^4 under halving") {
    // At infinite temperature the odd (phase) sector vanishes identically,
    // so the leading error of the order-2 truncation is the lambda^4
    // amplitude term; at finite beta the missing lambda^3 phase dominates.
    IsingConfig cfg = random_cfg(4, 0.0, 170);
    cfg.t_max = 2.0;
    cfg.dt = 0.01;
    cfg.order = 2;
    std::vector<double> errs;
    double lambda = 0.08;
    for (int k = 0; k < 4; ++k) {
        cfg.lambda = lambda;
        cfg.method = Method::Exact;
        BlochTrajectory exact = run_ising(cfg);
        cfg.method = Method::TCL;
        BlochTrajectory tcl = run_ising(cfg);
        errs.push_back(max_vx_deviation(tcl, exact));
        lambda *= 0.5;
    }
    for (int k = 0; k + 1 < 4; ++k) {
        const double order = std::log2(errs[k] / errs[k + 1]);
        CHECK(order > 3.5);
        CHECK(order < 4.5);
    }
}
