// SPDX-License-Identifier: MIT

#include "iasim/specfun.hpp"

#include <armadillo>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "iasim/rng.hpp"

namespace iasim {

namespace {

constexpr double kEps = 1.0e-15;

// Factorials 0!..170! (the largest finite in double precision).
const std::array<double, 171>& fact_table() {
    static const std::array<double, 171> table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i)
            t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table;
}

double binom(int n, int k) {
    const auto& f = fact_table();
    return f[static_cast<std::size_t>(n)] /
           (f[static_cast<std::size_t>(k)] * f[static_cast<std::size_t>(n - k)]);
}

void check_expint_args(int n, double z) {
    if (n < 0)
        throw std::domain_error("expint: order n must be >= 0");
    if (!(z > 0.0))
        throw std::domain_error("expint: argument z must be > 0");
}

// E_1(z) for 0 < z < 1 by the convergent power series
// E_1(z) = -gamma - ln z + sum_{k>=1} (-1)^{k+1} z^k / (k·k!).
double e1_series(double z) {
    double sum = -std::numbers::egamma - std::log(z);
    double pow_term = 1.0; // z^k / k!
    for (int k = 1; k <= 60; ++k) {
        pow_term *= z / k;
        const double add = pow_term / k;
        sum += (k & 1) ? add : -add;
        if (add < kEps * std::abs(sum))
            break;
    }
    return sum;
}

// e^z · E_n(z) for z >= 1 by the standard continued fraction, evaluated with
// the modified Lentz scheme. Each order is computed directly; the upward
// recurrence is avoided here because it amplifies error by ~z/n per step.
double expint_cf_scaled(int n, double z) {
    constexpr double fpmin = 1.0e-300;
    double b = z + n;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double a = -static_cast<double>(i) * (n - 1.0 + i);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < fpmin)
            d = fpmin;
        c = b + a / c;
        if (std::abs(c) < fpmin)
            c = fpmin;
        d = 1.0 / d;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) <= kEps)
            return h;
    }
    throw std::runtime_error("expint: continued fraction failed to converge");
}

// Scaled integrals e^z E_1(z) .. e^z E_nmax(z). For z < 1 the scaled upward
// recurrence S_{n+1} = (1 - z·S_n)/n is stable; for z >= 1 each order uses
// the continued fraction.
std::vector<double> expint_scaled_table(int nmax, double z) {
    std::vector<double> s(static_cast<std::size_t>(nmax) + 1, 0.0);
    if (z < 1.0) {
        s[1] = std::exp(z) * e1_series(z);
        for (int n = 1; n < nmax; ++n)
            s[static_cast<std::size_t>(n) + 1] = (1.0 - z * s[static_cast<std::size_t>(n)]) / n;
    } else {
        for (int n = 1; n <= nmax; ++n)
            s[static_cast<std::size_t>(n)] = expint_cf_scaled(n, z);
    }
    return s;
}

} // namespace

double expint_scaled(int n, double z) {
    check_expint_args(n, z);
    if (n == 0)
        return 1.0 / z;
    if (z >= 1.0)
        return expint_cf_scaled(n, z);
    return expint_scaled_table(n, z)[static_cast<std::size_t>(n)];
}

double expint(int n, double z) {
    check_expint_args(n, z);
    if (n == 0)
        return std::exp(-z) / z;
    if (z >= 1.0)
        return std::exp(-z) * expint_cf_scaled(n, z); // underflows to 0 for huge z
    double e = e1_series(z);
    const double emz = std::exp(-z);
    for (int m = 1; m < n; ++m)
        e = (emz - z * e) / m;
    return e;
}

double ergodic_rate(double snr, int d, int m) {
    if (!(snr > 0.0))
        throw std::invalid_argument("ergodic_rate: snr must be > 0");
    if (d < 1 || m < d)
        throw std::invalid_argument("ergodic_rate: need 1 <= d <= m");
    if (2 * (m - 1) > 170)
        throw std::invalid_argument("ergodic_rate: dimensions too large");

    const double z = static_cast<double>(d) / snr;
    const int nmax = m + d - 1; // highest order touched by the sum
    const std::vector<double> s = expint_scaled_table(nmax, z);

    // prefix[q] = sum_{n=0}^{q} e^z E_{n+1}(z)
    std::vector<double> prefix(static_cast<std::size_t>(nmax), 0.0);
    prefix[0] = s[1];
    for (int q = 1; q < nmax; ++q)
        prefix[static_cast<std::size_t>(q)] =
            prefix[static_cast<std::size_t>(q) - 1] + s[static_cast<std::size_t>(q) + 1];

    const auto& f = fact_table();
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            for (int l = 0; l <= 2 * j; ++l) {
                double coef = f[static_cast<std::size_t>(2 * j)] *
                              f[static_cast<std::size_t>(m - d + l)] /
                              (std::ldexp(1.0, 2 * i - l) * f[static_cast<std::size_t>(j)] *
                               f[static_cast<std::size_t>(l)] *
                               f[static_cast<std::size_t>(m - d + j)]);
                if (l & 1)
                    coef = -coef;
                coef *= binom(2 * i - 2 * j, i - j) * binom(2 * j + 2 * m - 2 * d, 2 * j - l);
                total += coef * prefix[static_cast<std::size_t>(m - d + l)];
            }
        }
    }
    // the e^{d/snr} prefactor is already folded into the scaled integrals
    return std::numbers::log2e * total;
}

double ergodic_rate_mimo(double snr, int nr, int nt) {
    return ergodic_rate(snr, std::min(nr, nt), std::max(nr, nt));
}

McRateEstimate mc_rate_oracle(double snr, int d, int m, std::size_t samples,
                              std::uint64_t seed) {
    if (d < 1 || m < d)
        throw std::invalid_argument("mc_rate_oracle: need 1 <= d <= m");
    if (snr < 0.0)
        throw std::invalid_argument("mc_rate_oracle: snr must be >= 0");
    if (samples < 1)
        throw std::invalid_argument("mc_rate_oracle: need at least one sample");
    if (snr == 0.0)
        return {0.0, 0.0, samples};

    Rng rng(seed);
    const double scale = snr / d;
    const double inv_ln2 = std::numbers::log2e;
    double sum = 0.0;
    double sum_sq = 0.0;
    arma::cx_mat h(static_cast<arma::uword>(d), static_cast<arma::uword>(m));
    for (std::size_t i = 0; i < samples; ++i) {
        for (arma::uword c = 0; c < h.n_cols; ++c)
            for (arma::uword r = 0; r < h.n_rows; ++r)
                h(r, c) = rng.cgauss();
        arma::cx_mat a = scale * (h * h.t());
        a.diag() += 1.0;
        a = 0.5 * (a + a.t()); // enforce exact Hermitian symmetry
        const double rate = arma::log_det_sympd(a) * inv_ln2;
        sum += rate;
        sum_sq += rate * rate;
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    double std_err = 0.0;
    if (samples > 1) {
        const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
        std_err = std::sqrt(var / n);
    }
    return {mean, std_err, samples};
}

} // namespace iasim
