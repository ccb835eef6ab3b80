#pragma once

#include <cmath>
#include <cstdint>

#include "tclplus/matrix.hpp"

namespace tclplus {

// Deterministic generator used for every random quantity in the project.
// splitmix64 + explicit Box-Muller keeps output identical across compilers
// and standard libraries, which the reproducibility contract (same seed =>
// byte-identical CSV) relies on; std::normal_distribution does not promise
// that.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // Entry ~ CN(0,1): real and imaginary parts N(0, 1/2).
    Complex complex_normal() {
        const double s = 0.7071067811865475244;
        return Complex(s * normal(), s * normal());
    }

    ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols) {
        ComplexMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
        return m;
    }

    // Hermitian Gaussian (GUE-type) matrix.
    ComplexMatrix gue(Eigen::Index n) {
        ComplexMatrix g = ginibre(n, n);
        return 0.5 * (g + ComplexMatrix(g.adjoint()));
    }

    ComplexMatrix hermitian(Eigen::Index n) { return gue(n); }

    // Random density matrix: normalized G G^dagger, full rank a.s.
    ComplexMatrix density_matrix(Eigen::Index n) {
        ComplexMatrix g = ginibre(n, n);
        ComplexMatrix rho = g * g.adjoint();
        rho /= rho.trace().real();
        return rho;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stable derivation of per-task seeds from a base seed and stream indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    Rng mix(base ^ (0x517cc1b727220a95ULL * (a + 1)) ^ (0x2545f4914f6cdd1dULL * (b + 1)));
    return mix.next_u64();
}

}  // namespace tclplus
