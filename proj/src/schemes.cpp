// SPDX-License-Identifier: MIT

#include "iasim/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "iasim/alignment.hpp"

namespace iasim {

namespace {

void check_inputs(const arma::mat& gains, const CsiErrorModel& err, double p_t_mw,
                  double p_noise_mw, const SchemeConfig& cfg, const char* who) {
    const auto k = static_cast<arma::uword>(cfg.K);
    if (cfg.K < 1 || cfg.Nr < 1 || cfg.Nt < 1 || cfg.d < 1 || cfg.tau_coh < 1)
        throw std::invalid_argument(std::string(who) + ": bad configuration");
    if (gains.n_rows != k || gains.n_cols != k || err.error_variance.n_rows != k ||
        err.error_variance.n_cols != k)
        throw std::invalid_argument(std::string(who) + ": gains/err must be K×K");
    if (!(p_t_mw >= 0.0) || !(p_noise_mw > 0.0))
        throw std::invalid_argument(std::string(who) + ": bad power arguments");
}

double rate_term(double snr, int d, int m) {
    return (snr > 0.0) ? ergodic_rate(snr, d, m) : 0.0;
}

} // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
    case Scheme::IA:
        return "IA";
    case Scheme::TDMA:
        return "TDMA";
    case Scheme::SU_MIMO:
        return "SU_MIMO";
    }
    throw std::invalid_argument("scheme_name: unknown scheme");
}

Scheme scheme_from_name(const std::string& name) {
    if (name == "IA")
        return Scheme::IA;
    if (name == "TDMA")
        return Scheme::TDMA;
    if (name == "SU_MIMO")
        return Scheme::SU_MIMO;
    throw std::invalid_argument("scheme_from_name: unknown scheme '" + name + "'");
}

SumRateResult ia_sum_rate(const arma::mat& gains, const CsiErrorModel& err, double p_t_mw,
                          double p_noise_mw, const SchemeConfig& cfg) {
    check_inputs(gains, err, p_t_mw, p_noise_mw, cfg, "ia_sum_rate");
    if (cfg.Nr != cfg.Nt)
        throw std::invalid_argument("ia_sum_rate: requires Nr == Nt");
    if (!feasible(cfg.K, cfg.Nr, cfg.d))
        throw std::invalid_argument("ia_sum_rate: infeasible (K, N, d)");

    const double tau = cfg.tau_coh;
    const double training = static_cast<double>(cfg.K) * (cfg.Nr + cfg.d);
    const double factor = std::max(0.0, (tau - training) / tau);

    SumRateResult res;
    res.per_user.set_size(static_cast<arma::uword>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        const double snr = effective_snr_ia(k, gains, err, p_t_mw, p_noise_mw);
        res.per_user(static_cast<arma::uword>(k)) = factor * rate_term(snr, cfg.d, cfg.d);
    }
    res.total = arma::accu(res.per_user);
    res.overhead_fraction = training / tau;
    return res;
}

SumRateResult tdma_sum_rate(const arma::mat& gains, const CsiErrorModel& err, double p_t_mw,
                            double p_noise_mw, const SchemeConfig& cfg) {
    check_inputs(gains, err, p_t_mw, p_noise_mw, cfg, "tdma_sum_rate");

    const double tau = cfg.tau_coh;
    const double training = static_cast<double>(cfg.K) * cfg.Nt;
    const double factor = std::max(0.0, (tau - training) / tau) / cfg.K;
    const int dmin = std::min(cfg.Nr, cfg.Nt);
    const int mmax = std::max(cfg.Nr, cfg.Nt);

    SumRateResult res;
    res.per_user.set_size(static_cast<arma::uword>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        const double snr = effective_snr_tdma(k, gains, err, p_t_mw, p_noise_mw);
        res.per_user(static_cast<arma::uword>(k)) = factor * rate_term(snr, dmin, mmax);
    }
    res.total = arma::accu(res.per_user);
    res.overhead_fraction = training / tau;
    return res;
}

SumRateResult su_mimo_sum_rate(const arma::mat& gains, const CsiErrorModel& err,
                               double p_t_mw, double p_noise_mw,
                               const SchemeConfig& cfg) {
    check_inputs(gains, err, p_t_mw, p_noise_mw, cfg, "su_mimo_sum_rate");

    const double tau = cfg.tau_coh;
    const double training = static_cast<double>(cfg.K) * cfg.Nt;
    const double factor = std::max(0.0, (tau - training) / tau);
    const int dmin = std::min(cfg.Nr, cfg.Nt);
    const int mmax = std::max(cfg.Nr, cfg.Nt);

    SumRateResult res;
    res.per_user.set_size(static_cast<arma::uword>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        const double snr = effective_snr_su_mimo(k, gains, err, p_t_mw, p_noise_mw);
        res.per_user(static_cast<arma::uword>(k)) = factor * rate_term(snr, dmin, mmax);
    }
    res.total = arma::accu(res.per_user);
    res.overhead_fraction = training / tau;
    return res;
}

SumRateResult sum_rate(const arma::mat& gains, const CsiErrorModel& err, double p_t_mw,
                       double p_noise_mw, const SchemeConfig& cfg) {
    switch (cfg.scheme) {
    case Scheme::IA:
        return ia_sum_rate(gains, err, p_t_mw, p_noise_mw, cfg);
    case Scheme::TDMA:
        return tdma_sum_rate(gains, err, p_t_mw, p_noise_mw, cfg);
    case Scheme::SU_MIMO:
        return su_mimo_sum_rate(gains, err, p_t_mw, p_noise_mw, cfg);
    }
    throw std::invalid_argument("sum_rate: unknown scheme");
}

double mi_lower_bound_check(const arma::cx_mat& estimate, double p_t_mw, int nt,
                            double err_var, double p_noise_mw) {
    if (nt < 1 || estimate.n_cols != static_cast<arma::uword>(nt) || estimate.n_rows < 1)
        throw std::invalid_argument("mi_lower_bound_check: bad estimate shape");
    if (!(err_var >= 0.0) || !(err_var < 1.0))
        throw std::invalid_argument("mi_lower_bound_check: need err_var in [0, 1)");
    if (!(p_t_mw >= 0.0) || !(p_noise_mw > 0.0))
        throw std::invalid_argument("mi_lower_bound_check: bad power arguments");

    constexpr double log2e = 1.4426950408889634;
    const arma::uword nr = estimate.n_rows;
    const double denom = p_t_mw * err_var + p_noise_mw;

    // bound on the normalized (unit-variance) estimate
    const arma::cx_mat norm_est = estimate / std::sqrt(1.0 - err_var);
    arma::cx_mat a(nr, nr, arma::fill::eye);
    a += (p_t_mw * (1.0 - err_var) / (nt * denom)) * (norm_est * norm_est.t());
    a = 0.5 * (a + a.t());
    const double bits_a = arma::log_det_sympd(a) * log2e;

    // pre-identity form with the worst-case-noise covariance kept explicit
    arma::cx_mat b(static_cast<arma::uword>(nt), static_cast<arma::uword>(nt),
                   arma::fill::eye);
    b += (p_t_mw / nt) * (estimate.t() * ((1.0 / denom) * estimate));
    b = 0.5 * (b + b.t());
    const double bits_b = arma::log_det_sympd(b) * log2e;

    const double scale = std::max({1.0, std::abs(bits_a), std::abs(bits_b)});
    if (std::abs(bits_a - bits_b) > 1.0e-10 * scale)
        throw std::runtime_error("mi_lower_bound_check: determinant identity violated");
    return bits_a;
}

} // namespace iasim
