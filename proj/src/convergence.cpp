#include "tclplus/convergence.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <thread>

#include "tclplus/linalg.hpp"
#include "tclplus/rng.hpp"

namespace tclplus::convergence {

ComplexMatrix random_matrix_with_norm(Eigen::Index dim, double target_norm,
                                      std::uint64_t seed, Ensemble ensemble) {
    if (dim < 1) throw DimensionError("random_matrix_with_norm: dim must be >= 1");
    if (target_norm <= 0) throw InvalidMatrix("random_matrix_with_norm: target_norm must be > 0");
    Rng rng(seed);
    ComplexMatrix m;
    if (ensemble == Ensemble::Chiral) {
        // [[0, G], [G^dag, 0]]: eigenvalues come in +-s pairs (s the singular
        // values of G, plus zeros when dim is odd), so the most negative
        // eigenvalue equals minus the norm.
        const Eigen::Index a = (dim + 1) / 2;
        const Eigen::Index b = dim - a;
        m = ComplexMatrix::Zero(dim, dim);
        if (b > 0) {
            ComplexMatrix g = rng.ginibre(a, b);
            m.block(0, a, a, b) = g;
            m.block(a, 0, b, a) = g.adjoint();
        } else {
            m(0, 0) = 1.0;  // dim = 1: the rescale below sets the magnitude
        }
    } else if (ensemble == Ensemble::Hermitian) {
        m = rng.gue(dim);
    } else {
        m = rng.ginibre(dim, dim);
    }
    const double norm = linalg::operator_norm(m);
    if (norm == 0.0) {
        // Measure-zero event; make the dim = 1 edge case well defined anyway.
        m = ComplexMatrix::Identity(dim, dim);
        return target_norm * m;
    }
    return (target_norm / norm) * m;
}

ConvergenceCurve convergence_curve(const ComplexMatrix& sigma, SeriesKind kind, long max_depth) {
    require_finite(sigma, "convergence_curve");
    if (sigma.rows() != sigma.cols()) throw DimensionError("convergence_curve: square input required");
    const Eigen::Index n = sigma.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a = id - sigma;

    ComplexMatrix reference;
    ComplexMatrix partial, term, step;
    if (kind == SeriesKind::Neumann) {
        Eigen::FullPivLU<ComplexMatrix> lu(a);
        if (!lu.isInvertible()) {
            throw SingularReference("convergence_curve: I - sigma is singular, Neumann reference "
                                    "inverse does not exist");
        }
        reference = lu.inverse();
        partial = id;   // k = 0 term
        term = id;      // current power sigma^k
        step = sigma;
    } else {
        reference = linalg::pinv_svd(a);
        partial = a.adjoint();  // k = 0 term A^dagger
        term = partial;
        step = id - a.adjoint() * a;  // multiplies the running term
    }

    ConvergenceCurve curve;
    curve.depths.reserve(max_depth + 1);
    curve.errors.reserve(max_depth + 1);
    for (long d = 0; d <= max_depth; ++d) {
        const ComplexMatrix diff = partial - reference;
        curve.depths.push_back(d);
        curve.errors.push_back(diff.allFinite() ? linalg::operator_norm(diff)
                                                : std::numeric_limits<double>::infinity());
        if (d < max_depth) {
            term = (step * term).eval();
            partial += term;
        }
    }
    return curve;
}

ConvergenceCurve partial_sum_norm_curve(const ComplexMatrix& sigma, SeriesKind kind,
                                        long max_depth) {
    require_finite(sigma, "partial_sum_norm_curve");
    const Eigen::Index n = sigma.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a = id - sigma;

    ComplexMatrix partial, term, step;
    if (kind == SeriesKind::Neumann) {
        partial = id;
        term = id;
        step = sigma;
    } else {
        partial = a.adjoint();
        term = partial;
        step = id - a.adjoint() * a;
    }

    ConvergenceCurve curve;
    for (long d = 0; d <= max_depth; ++d) {
        curve.depths.push_back(d);
        curve.errors.push_back(partial.allFinite() ? linalg::operator_norm(partial)
                                                   : std::numeric_limits<double>::infinity());
        if (d < max_depth) {
            term = (step * term).eval();
            partial += term;
        }
    }
    return curve;
}

DepthFit fit_depth_constant(const ConvergenceCurve& curve, SeriesKind kind, double norm_of_sigma) {
    const std::size_t n = curve.errors.size();
    // Largest contiguous window of finite, nonzero samples.
    std::size_t best_begin = 0, best_len = 0, begin = 0;
    bool in_window = false;
    auto usable = [](double e) { return std::isfinite(e) && e > 0.0; };
    for (std::size_t i = 0; i <= n; ++i) {
        if (i < n && usable(curve.errors[i])) {
            if (!in_window) {
                begin = i;
                in_window = true;
            }
        } else if (in_window) {
            if (i - begin > best_len) {
                best_begin = begin;
                best_len = i - begin;
            }
            in_window = false;
        }
    }

    DepthFit fit{0.0, 0.0, 0.0, kind, norm_of_sigma};
    if (best_len == 0) {
        // Every sample underflowed to zero: exact finite-rank convergence.
        fit.tau = std::numeric_limits<double>::infinity();
        fit.r_squared = 1.0;
        return fit;
    }
    if (best_len < 10) {
        throw InvalidMatrix("fit_depth_constant: fewer than 10 usable error samples");
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double m = static_cast<double>(best_len);
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) {
        const double x = static_cast<double>(curve.depths[i]);
        const double y = std::log(curve.errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m;
    fit.amplitude = std::exp(intercept);
    fit.tau = (slope == 0.0) ? std::numeric_limits<double>::infinity() : -1.0 / slope;
    const double ss_tot = syy - sy * sy / m;
    double ss_res = 0;
    for (std::size_t i = best_begin; i < best_begin + best_len; ++i) {
        const double pred = intercept + slope * static_cast<double>(curve.depths[i]);
        const double r = std::log(curve.errors[i]) - pred;
        ss_res += r * r;
    }
    fit.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

std::vector<SweepRow> threshold_sweep(const std::vector<double>& norms, std::uint64_t seed,
                                      const SweepConfig& config) {
    if (config.trials < 1) throw InvalidOrder("threshold_sweep: trials must be >= 1");
    struct Cell {
        double tau_i = 0, tau_p = 0;
        bool neumann_valid = true;
    };
    std::vector<Cell> cells(norms.size() * static_cast<std::size_t>(config.trials));

    auto run_cell = [&](std::size_t norm_idx, int trial) {
        const std::uint64_t s = derive_seed(seed, norm_idx, static_cast<std::uint64_t>(trial));
        const ComplexMatrix sigma =
            random_matrix_with_norm(config.dim, norms[norm_idx], s, config.ensemble);
        Cell cell;
        // A trial can land I - sigma exactly on singularity (an eigenvalue of
        // sigma at 1); the Neumann reference does not exist there and the
        // trial is excluded from the Neumann average.
        try {
            auto ci = convergence_curve(sigma, SeriesKind::Neumann, config.max_depth);
            cell.tau_i = fit_depth_constant(ci, SeriesKind::Neumann, norms[norm_idx]).tau;
        } catch (const SingularReference&) {
            cell.neumann_valid = false;
        }
        auto cp = convergence_curve(sigma, SeriesKind::Pinv, config.max_depth);
        cell.tau_p = fit_depth_constant(cp, SeriesKind::Pinv, norms[norm_idx]).tau;
        cells[norm_idx * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(trial)] = cell;
    };

    const std::size_t total = cells.size();
    const int nthreads = std::max(1, config.threads);
    if (nthreads == 1) {
        for (std::size_t k = 0; k < total; ++k) {
            run_cell(k / static_cast<std::size_t>(config.trials),
                     static_cast<int>(k % static_cast<std::size_t>(config.trials)));
        }
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nthreads; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t k = static_cast<std::size_t>(w); k < total;
                     k += static_cast<std::size_t>(nthreads)) {
                    run_cell(k / static_cast<std::size_t>(config.trials),
                             static_cast<int>(k % static_cast<std::size_t>(config.trials)));
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    std::vector<SweepRow> rows;
    rows.reserve(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i) {
        double mi = 0, mp = 0;
        int ni = 0;
        for (int t = 0; t < config.trials; ++t) {
            const Cell& c = cells[i * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(t)];
            if (c.neumann_valid) {
                mi += c.tau_i;
                ++ni;
            }
            mp += c.tau_p;
        }
        mi = ni ? mi / ni : std::numeric_limits<double>::quiet_NaN();
        mp /= config.trials;
        double vi = 0, vp = 0;
        for (int t = 0; t < config.trials; ++t) {
            const Cell& c = cells[i * static_cast<std::size_t>(config.trials) + static_cast<std::size_t>(t)];
            if (c.neumann_valid) vi += (c.tau_i - mi) * (c.tau_i - mi);
            vp += (c.tau_p - mp) * (c.tau_p - mp);
        }
        rows.push_back(SweepRow{norms[i], mi, ni ? std::sqrt(vi / ni) : 0.0, mp,
                                std::sqrt(vp / config.trials)});
    }
    return rows;
}

std::vector<double> default_norm_grid() {
    std::vector<double> norms;
    for (int i = 1; i <= 32; ++i) norms.push_back(0.05 * i);
    return norms;
}

}  // namespace tclplus::convergence
