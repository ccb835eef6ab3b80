#include "tclplus/expansion.hpp"

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "tclplus/linalg.hpp"

namespace tclplus::expansion {

using nc::Polynomial;
using superop::SpaceDims;
using superop::SuperOperator;

namespace {

// Sigma and Sigma^dagger as formal polynomials up to the given grade.
Polynomial sigma_poly(int max_grade, bool daggered) {
    Polynomial out;
    for (int m = 1; m <= max_grade; ++m) {
        out.add_term(1, {daggered ? nc::sigma_dagger(m) : nc::sigma(m)});
    }
    return out;
}

std::vector<Polynomial> split_orders(const Polynomial& total, int max_order) {
    std::vector<Polynomial> orders;
    orders.reserve(max_order);
    for (int n = 1; n <= max_order; ++n) orders.push_back(total.grade_part(n - 1));
    return orders;
}

// Full pseudoinverse-series polynomial through the given grade, optionally
// recording the daggered-term peak per grade across partial k-sums.
Polynomial pinv_series_poly(int max_grade, std::vector<std::size_t>* peak_daggered) {
    const Polynomial sig = sigma_poly(max_grade, false);
    const Polynomial sig_dag = sigma_poly(max_grade, true);
    // M = Sigma^dag + Sigma - Sigma^dag Sigma
    Polynomial m = sig_dag + sig - sig_dag.multiply(sig, max_grade);
    // tail = (I - Sigma^dag) Sigma
    Polynomial tail = sig - sig_dag.multiply(sig, max_grade);

    if (peak_daggered) peak_daggered->assign(max_grade + 1, 0);
    auto record = [&](const Polynomial& partial) {
        if (!peak_daggered) return;
        for (int g = 0; g <= max_grade; ++g) {
            std::size_t count = partial.grade_part(g).daggered_part().term_count();
            (*peak_daggered)[g] = std::max((*peak_daggered)[g], count);
        }
    };

    Polynomial total = tail;
    record(total);
    Polynomial power = tail;
    // M carries at least one power of lambda, so k <= max_grade suffices.
    for (int k = 1; k <= max_grade; ++k) {
        power = m.multiply(power, max_grade);
        if (power.is_zero()) break;
        total += power;
        record(total);
    }
    return total;
}

}  // namespace

std::vector<Polynomial> expand_neumann_terms(int max_order) {
    if (max_order < 1) throw InvalidOrder("expand_neumann_terms: max_order must be >= 1");
    const int max_grade = max_order - 1;
    const Polynomial sig = sigma_poly(max_grade, false);
    // sum_{k>=1} Sigma^k; the k = 0 identity word is the order-1 term, which
    // vanishes by P L P = 0 and is dropped by convention.
    Polynomial total;
    Polynomial power = sig;
    for (int k = 1; k <= max_grade; ++k) {
        total += power;
        power = sig.multiply(power, max_grade);
    }
    return split_orders(total, max_order);
}

std::vector<Polynomial> expand_pinv_terms(int max_order) {
    if (max_order < 1) throw InvalidOrder("expand_pinv_terms: max_order must be >= 1");
    return split_orders(pinv_series_poly(max_order - 1, nullptr), max_order);
}

std::vector<DaggerCancellation> dagger_cancellation_stats(int max_order) {
    if (max_order < 1) throw InvalidOrder("dagger_cancellation_stats: max_order must be >= 1");
    std::vector<std::size_t> peaks;
    Polynomial total = pinv_series_poly(max_order - 1, &peaks);
    std::vector<DaggerCancellation> out;
    for (int n = 1; n <= max_order; ++n) {
        out.push_back(DaggerCancellation{
            n, peaks[n - 1], total.grade_part(n - 1).daggered_part().term_count()});
    }
    return out;
}

namespace {

ComplexMatrix expm(const ComplexMatrix& a) { return a.exp(); }

struct ProjectorCache {
    ComplexMatrix p;
    ComplexMatrix q;
};

ProjectorCache projectors(const TimeDependentModel& model) {
    SuperOperator p = superop::projector_p(model.bath);
    ComplexMatrix q = ComplexMatrix::Identity(p.mat.rows(), p.mat.cols()) - p.mat;
    return ProjectorCache{std::move(p.mat), std::move(q)};
}

ComplexMatrix liouvillian_mat(const TimeDependentModel& model, double t) {
    return superop::liouvillian(model.hamiltonian(t), model.dims).mat;
}

ComplexMatrix sigma_exact_mat(const TimeDependentModel& model, double t, int quad_steps,
                              double lambda_override) {
    if (quad_steps < 2) throw InvalidOrder("sigma_exact: quad_steps must be >= 2");
    if (t < model.t0) throw InvalidOrder("sigma_exact: t must be >= t0");
    const double lambda = lambda_override;
    const Eigen::Index n = model.dims.vec_dim();
    if (t == model.t0 || lambda == 0.0) return ComplexMatrix::Zero(n, n);

    const ProjectorCache pc = projectors(model);
    const double dt = (t - model.t0) / quad_steps;

    // March s from t down to t0 maintaining G+(t, s) and U-(s, t); the
    // integrand G+ (Q L(s)) P U- is accumulated with trapezoid weights.
    ComplexMatrix g = ComplexMatrix::Identity(n, n);
    ComplexMatrix u = ComplexMatrix::Identity(n, n);
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (int j = 0; j <= quad_steps; ++j) {
        const double s = t - j * dt;
        const double w = (j == 0 || j == quad_steps) ? 0.5 : 1.0;
        const ComplexMatrix ls = liouvillian_mat(model, s);
        acc += (w * dt) * (g * (pc.q * ls) * pc.p * u);
        if (j < quad_steps) {
            const double mid = s - 0.5 * dt;
            const ComplexMatrix lmid = liouvillian_mat(model, mid);
            g = g * expm((lambda * dt) * (pc.q * lmid));
            u = expm((-lambda * dt) * lmid) * u;
        }
    }
    return lambda * acc;
}

}  // namespace

SuperOperator sigma_exact(const TimeDependentModel& model, double t, int quad_steps) {
    return SuperOperator{model.dims, sigma_exact_mat(model, t, quad_steps, model.lambda)};
}

SuperOperator sigma_m(int m, double t, const TimeDependentModel& model, int quad_steps) {
    if (m < 1 || m > 4) {
        throw InvalidOrder("sigma_m: supported orders are 1..4 (1, 2 analytic; 3, 4 by "
                           "lambda-Taylor extraction)");
    }
    const Eigen::Index n = model.dims.vec_dim();
    if (t == model.t0) return SuperOperator{model.dims, ComplexMatrix::Zero(n, n)};

    if (m == 1) {
        // Simpson quadrature of L(s) P over [t0, t].
        int steps = quad_steps + (quad_steps % 2);
        if (steps < 2) steps = 2;
        const double dt = (t - model.t0) / steps;
        const ProjectorCache pc = projectors(model);
        ComplexMatrix acc = ComplexMatrix::Zero(n, n);
        for (int j = 0; j <= steps; ++j) {
            const double s = model.t0 + j * dt;
            double w = (j == 0 || j == steps) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
            acc += w * (liouvillian_mat(model, s) * pc.p);
        }
        return SuperOperator{model.dims, (dt / 3.0) * acc};
    }

    if (m == 2) {
        // Sigma_2(t) = int_t0^t [Q L(s) Sigma_1(s) - Sigma_1(s) L(s)] ds with
        // Sigma_1 accumulated on the same grid (trapezoid on both levels).
        const int steps = std::max(quad_steps, 2);
        const double dt = (t - model.t0) / steps;
        const ProjectorCache pc = projectors(model);
        ComplexMatrix sig1 = ComplexMatrix::Zero(n, n);
        ComplexMatrix prev_inner = liouvillian_mat(model, model.t0) * pc.p;
        ComplexMatrix acc = ComplexMatrix::Zero(n, n);
        ComplexMatrix prev_outer = ComplexMatrix::Zero(n, n);  // integrand at t0 (Sigma_1 = 0)
        for (int j = 1; j <= steps; ++j) {
            const double s = model.t0 + j * dt;
            const ComplexMatrix ls = liouvillian_mat(model, s);
            const ComplexMatrix inner = ls * pc.p;
            sig1 += (0.5 * dt) * (prev_inner + inner);
            prev_inner = inner;
            const ComplexMatrix outer = pc.q * (ls * sig1) - sig1 * ls;
            acc += (0.5 * dt) * (prev_outer + outer);
            prev_outer = outer;
        }
        return SuperOperator{model.dims, std::move(acc)};
    }

    // m = 3, 4: central finite differences in lambda of sigma_exact.
    const double h = 1e-2;
    const ComplexMatrix f1 = sigma_exact_mat(model, t, quad_steps, h);
    const ComplexMatrix f2 = sigma_exact_mat(model, t, quad_steps, 2 * h);
    const ComplexMatrix fm1 = sigma_exact_mat(model, t, quad_steps, -h);
    const ComplexMatrix fm2 = sigma_exact_mat(model, t, quad_steps, -2 * h);
    if (m == 3) {
        // f'''(0)/3! with the 5-point stencil (center value unused).
        return SuperOperator{model.dims, (f2 - 2.0 * f1 + 2.0 * fm1 - fm2) / (12.0 * h * h * h)};
    }
    // f''''(0)/4!, f(0) = 0.
    return SuperOperator{model.dims, (f2 - 4.0 * f1 - 4.0 * fm1 + fm2) / (24.0 * h * h * h * h)};
}

ComplexMatrix bind_sigma_polynomial(const nc::Polynomial& poly,
                                    const std::vector<ComplexMatrix>& sigma_values,
                                    Eigen::Index dim) {
    ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
    for (const nc::Monomial& mono : poly.monomials()) {
        ComplexMatrix word = ComplexMatrix::Identity(dim, dim);
        for (const nc::Symbol& s : mono.factors) {
            const std::size_t m = static_cast<std::size_t>(s.order);
            if (s.kind == nc::Kind::Sigma) {
                if (m >= sigma_values.size()) throw InvalidOrder("bind_sigma_polynomial: missing Sigma_m value");
                word = word * sigma_values[m];
            } else if (s.kind == nc::Kind::SigmaDagger) {
                if (m >= sigma_values.size()) throw InvalidOrder("bind_sigma_polynomial: missing Sigma_m value");
                word = word * sigma_values[m].adjoint();
            } else {
                throw InvalidOrder("bind_sigma_polynomial: only Sigma symbols can be bound here");
            }
        }
        out += static_cast<double>(mono.coeff) * word;
    }
    return out;
}

SuperOperator assemble_generator(Method method, int order, double t,
                                 const TimeDependentModel& model, int quad_steps) {
    const Eigen::Index n = model.dims.vec_dim();
    if (model.lambda == 0.0) return SuperOperator{model.dims, ComplexMatrix::Zero(n, n)};

    const ProjectorCache pc = projectors(model);
    const ComplexMatrix lhat = pc.p * liouvillian_mat(model, t);

    if (method == Method::NonperturbativeInverse || method == Method::NonperturbativePinv) {
        const ComplexMatrix sig = sigma_exact_mat(model, t, quad_steps, model.lambda);
        return SuperOperator{model.dims,
                             generator_from_sigma(method, sig, lhat, pc.p, model.lambda, t)};
    }

    if (order < 2) throw InvalidOrder("assemble_generator: perturbative methods need order >= 2");
    if (order > 5) {
        throw InvalidOrder("assemble_generator: perturbative assembly supports order <= 5 "
                           "(Sigma_m extraction is capped at m = 4)");
    }

    std::vector<ComplexMatrix> sigma_values(static_cast<std::size_t>(order));
    for (int m = 1; m <= order - 1; ++m) {
        sigma_values[static_cast<std::size_t>(m)] = sigma_m(m, t, model, quad_steps).mat;
    }

    const auto orders = (method == Method::TCL) ? expand_neumann_terms(order)
                                                : expand_pinv_terms(order);
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    double lam_pow = model.lambda;  // order-1 term: lambda L-hat P (zero when shifted)
    acc += lam_pow * (lhat * pc.p);
    for (int ord = 2; ord <= order; ++ord) {
        lam_pow *= model.lambda;
        const ComplexMatrix bound =
            bind_sigma_polynomial(orders[static_cast<std::size_t>(ord - 1)], sigma_values, n);
        acc += lam_pow * (lhat * bound * pc.p);
    }
    return SuperOperator{model.dims, std::move(acc)};
}

ComplexMatrix generator_from_sigma(Method method, const ComplexMatrix& sigma,
                                   const ComplexMatrix& lhat_p_left, const ComplexMatrix& p,
                                   double lambda, double t) {
    const Eigen::Index n = sigma.rows();
    const ComplexMatrix a = ComplexMatrix::Identity(n, n) - sigma;
    if (method == Method::NonperturbativeInverse) {
        // det(I - Sigma) = 1 at t0; collapse below 1e-12 of that scale is
        // breakdown, reported rather than masked.
        if (std::abs(a.determinant()) < 1e-12) {
            throw SingularGenerator("generator_from_sigma: I - Sigma is singular (TCL breakdown)",
                                    t);
        }
        return lambda * (lhat_p_left * a.inverse() * p);
    }
    if (method == Method::NonperturbativePinv) {
        return lambda * (lhat_p_left * linalg::pinv_svd(a) * sigma * p);
    }
    throw InvalidOrder("generator_from_sigma: nonperturbative methods only");
}

BreakdownScan detect_breakdown(const TimeDependentModel& model,
                               const std::vector<double>& times, int quad_steps) {
    BreakdownScan scan;
    for (double t : times) {
        const ComplexMatrix sig = sigma_exact_mat(model, t, quad_steps, model.lambda);
        if (!scan.first_norm_crossing && linalg::operator_norm(sig) >= 1.0) {
            scan.first_norm_crossing = t;
        }
        const ComplexMatrix a = ComplexMatrix::Identity(sig.rows(), sig.cols()) - sig;
        if (!scan.first_det_collapse && std::abs(a.determinant()) < 1e-12) {
            scan.first_det_collapse = t;
        }
        if (scan.first_norm_crossing && scan.first_det_collapse) break;
    }
    return scan;
}

}  // namespace tclplus::expansion
