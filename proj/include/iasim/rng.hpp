// SPDX-License-Identifier: MIT
//
// Deterministic random-number utilities. All stochastic output of the library
// flows through this header so that results are reproducible bit-for-bit for a
// given seed, independent of the standard library's distribution internals.
#pragma once

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>

namespace iasim {

// SplitMix64 finalizer: avalanche-mixes a 64-bit word.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

// Deterministic sub-stream seed for work unit `index` under `master`.
// Stable across versions; parallel reductions rely on it.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

// Seeded generator with explicitly constructed uniform/Gaussian outputs
// (std::mt19937_64 raw words only; no implementation-defined distributions).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; second deviate cached.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Standard complex normal CN(0,1): unit total variance.
    std::complex<double> cgauss() {
        const double re = gauss();
        const double im = gauss();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

    std::uint64_t raw() { return eng_(); }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// rows×cols matrix of i.i.d. CN(0,1) entries, filled column-major.
inline arma::cx_mat gaussian_matrix(Rng& rng, arma::uword rows, arma::uword cols) {
    arma::cx_mat a(rows, cols);
    for (arma::uword c = 0; c < cols; ++c)
        for (arma::uword r = 0; r < rows; ++r)
            a(r, c) = rng.cgauss();
    return a;
}

// Haar-distributed n×d semi-unitary matrix: QR of a Gaussian matrix with the
// R-diagonal phases absorbed into Q so the distribution is exactly Haar.
inline arma::cx_mat haar_semiunitary(Rng& rng, arma::uword n, arma::uword d) {
    arma::cx_mat a = gaussian_matrix(rng, n, d);
    arma::cx_mat q, r;
    if (!arma::qr_econ(q, r, a))
        throw std::runtime_error("haar_semiunitary: QR decomposition failed");
    for (arma::uword c = 0; c < d; ++c) {
        const std::complex<double> rc = r(c, c);
        const double m = std::abs(rc);
        if (m > 0.0)
            q.col(c) *= std::conj(rc) / m;
    }
    return q;
}

} // namespace iasim
