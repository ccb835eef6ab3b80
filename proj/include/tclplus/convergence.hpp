#pragma once

#include <cstdint>
#include <vector>

#include "tclplus/matrix.hpp"

namespace tclplus::convergence {

enum class SeriesKind { Neumann, Pinv };
enum class Ensemble { Chiral, Hermitian, Ginibre };

// Random matrix rescaled so operator_norm(result) == target_norm (up to
// rounding). Chiral is the default ensemble: Hermitian with off-diagonal
// block structure, so the spectrum is symmetric about zero by construction.
// Rescaled to norm x it has spectral radius exactly x and ||I - Sigma||
// exactly 1 + x, which places the two series' convergence thresholds at
// their theoretical norms (1 and sqrt(2) - 1) instead of at locations set
// by ensemble edge statistics. Plain Hermitian smears the pinv threshold by
// its edge fluctuations; Ginibre moves both thresholds far out because its
// spectral radius is about half its norm. Both remain available for
// comparison runs.
ComplexMatrix random_matrix_with_norm(Eigen::Index dim, double target_norm,
                                      std::uint64_t seed,
                                      Ensemble ensemble = Ensemble::Chiral);

struct ConvergenceCurve {
    std::vector<long> depths;    // strictly increasing, 0..max_depth
    std::vector<double> errors;  // operator-norm distance to the reference
};

// errors[d] = || depth-d partial sum - reference ||. For Neumann the
// reference is (I - sigma)^{-1} (SingularReference if it does not exist);
// for Pinv it is pinv_svd(I - sigma).
ConvergenceCurve convergence_curve(const ComplexMatrix& sigma, SeriesKind kind, long max_depth);

// Norms of the partial sums themselves; the divergence evidence when no
// reference inverse exists.
ConvergenceCurve partial_sum_norm_curve(const ComplexMatrix& sigma, SeriesKind kind,
                                        long max_depth);

struct DepthFit {
    double tau;        // e-folding depth; negative = divergence
    double amplitude;  // prefactor exp(intercept)
    double r_squared;
    SeriesKind series_kind;
    double norm_of_sigma;
};

// Least-squares line through (depth, log error) over the largest contiguous
// window of finite nonzero errors; tau = -1/slope. All-zero error curves
// (exact finite-rank convergence) give tau = +infinity.
DepthFit fit_depth_constant(const ConvergenceCurve& curve, SeriesKind kind = SeriesKind::Neumann,
                            double norm_of_sigma = 0.0);

struct SweepRow {
    double norm;
    double tau_neumann_mean;
    double tau_neumann_std;
    double tau_pinv_mean;
    double tau_pinv_std;
};

struct SweepConfig {
    Eigen::Index dim = 16;
    int trials = 50;
    long max_depth = 300;
    Ensemble ensemble = Ensemble::Chiral;
    int threads = 1;
};

// Per-norm averages of both depth constants over random trials; the data
// behind the depth-constant-versus-norm plot.
std::vector<SweepRow> threshold_sweep(const std::vector<double>& norms, std::uint64_t seed,
                                      const SweepConfig& config);

std::vector<double> default_norm_grid();  // 0.05 .. 1.6 step 0.05

}  // namespace tclplus::convergence
