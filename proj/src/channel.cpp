// SPDX-License-Identifier: MIT

#include "iasim/channel.hpp"

#include <stdexcept>

#include "iasim/rng.hpp"

namespace iasim {

namespace {

void check_snr_args(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                    double p_t_mw, double p_noise_mw) {
    const int K = static_cast<int>(gains.n_rows);
    if (gains.n_rows != gains.n_cols)
        throw std::invalid_argument("effective_snr: gains must be square");
    if (err.error_variance.n_rows != gains.n_rows ||
        err.error_variance.n_cols != gains.n_cols)
        throw std::invalid_argument("effective_snr: error-variance shape mismatch");
    if (k < 0 || k >= K)
        throw std::invalid_argument("effective_snr: user index out of range");
    if (!(p_t_mw > 0.0) || !(p_noise_mw > 0.0))
        throw std::invalid_argument("effective_snr: powers must be > 0");
}

} // namespace

ChannelSet draw_channels(int K, int Nr, int Nt, std::uint64_t rng_seed) {
    if (K < 1 || Nr < 1 || Nt < 1)
        throw std::invalid_argument("draw_channels: dimensions must be >= 1");
    Rng rng(rng_seed);
    ChannelSet cs;
    cs.K = K;
    cs.Nr = Nr;
    cs.Nt = Nt;
    cs.mats.reserve(static_cast<std::size_t>(K) * K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
            cs.mats.push_back(gaussian_matrix(rng, static_cast<arma::uword>(Nr),
                                              static_cast<arma::uword>(Nt)));
    return cs;
}

double estimation_error_variance(double pilot_len, double p_r, int streams_or_antennas,
                                 double p_noise) {
    if (!(pilot_len > 0.0) || !(p_r > 0.0) || streams_or_antennas < 1 || !(p_noise > 0.0))
        throw std::invalid_argument("estimation_error_variance: inputs must be > 0");
    return p_noise / (p_noise + pilot_len * p_r / streams_or_antennas);
}

CsiErrorModel csi_error_minimum_training(const LinkGainMatrix& gains, double p_t_mw,
                                         double p_noise_mw, int nr, int d) {
    if (gains.n_rows != gains.n_cols)
        throw std::invalid_argument("csi_error_minimum_training: gains must be square");
    if (!(p_t_mw > 0.0) || !(p_noise_mw > 0.0))
        throw std::invalid_argument("csi_error_minimum_training: powers must be > 0");
    if (nr < 1 || d < 1)
        throw std::invalid_argument("csi_error_minimum_training: dimensions must be >= 1");
    const int K = static_cast<int>(gains.n_rows);
    CsiErrorModel err;
    err.tau_rp = static_cast<double>(K) * nr;
    err.tau_fp = static_cast<double>(K) * d;
    err.error_variance.set_size(gains.n_rows, gains.n_cols);
    for (arma::uword k = 0; k < gains.n_rows; ++k)
        for (arma::uword i = 0; i < gains.n_cols; ++i)
            err.error_variance(k, i) =
                p_noise_mw / (p_noise_mw + K * p_t_mw * gains(k, i));
    return err;
}

CsiErrorModel csi_error_perfect(int K) {
    if (K < 1)
        throw std::invalid_argument("csi_error_perfect: K must be >= 1");
    CsiErrorModel err;
    err.error_variance.zeros(static_cast<arma::uword>(K), static_cast<arma::uword>(K));
    return err;
}

double effective_snr_ia(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                        double p_t_mw, double p_noise_mw) {
    check_snr_args(k, gains, err, p_t_mw, p_noise_mw);
    const arma::uword ku = static_cast<arma::uword>(k);
    const double direct = p_t_mw * gains(ku, ku);
    double denom = p_noise_mw;
    for (arma::uword i = 0; i < gains.n_cols; ++i)
        denom += p_t_mw * gains(ku, i) * err.error_variance(ku, i);
    return direct * (1.0 - err.error_variance(ku, ku)) / denom;
}

double effective_snr_tdma(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                          double p_t_mw, double p_noise_mw) {
    check_snr_args(k, gains, err, p_t_mw, p_noise_mw);
    const arma::uword ku = static_cast<arma::uword>(k);
    const double direct = p_t_mw * gains(ku, ku);
    const double s2 = err.error_variance(ku, ku);
    return direct * (1.0 - s2) / (direct * s2 + p_noise_mw);
}

double effective_snr_su_mimo(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                             double p_t_mw, double p_noise_mw) {
    check_snr_args(k, gains, err, p_t_mw, p_noise_mw);
    const arma::uword ku = static_cast<arma::uword>(k);
    const double direct = p_t_mw * gains(ku, ku);
    double denom = direct * err.error_variance(ku, ku) + p_noise_mw;
    for (arma::uword i = 0; i < gains.n_cols; ++i)
        if (i != ku)
            denom += p_t_mw * gains(ku, i);
    return direct * (1.0 - err.error_variance(ku, ku)) / denom;
}

EstimatedChannelSet split_estimate(const std::vector<arma::cx_mat>& links, int K,
                                   const CsiErrorModel& err, std::uint64_t rng_seed) {
    if (K < 1 || links.size() != static_cast<std::size_t>(K) * K)
        throw std::invalid_argument("split_estimate: need K*K link matrices");
    if (err.error_variance.n_rows != static_cast<arma::uword>(K) ||
        err.error_variance.n_cols != static_cast<arma::uword>(K))
        throw std::invalid_argument("split_estimate: error-variance shape mismatch");

    Rng rng(rng_seed);
    EstimatedChannelSet out;
    out.K = K;
    out.estimates.reserve(links.size());
    out.errors.reserve(links.size());
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < K; ++i) {
            const arma::cx_mat& h = links[static_cast<std::size_t>(k * K + i)];
            const double s2 = err.error_variance(static_cast<arma::uword>(k),
                                                 static_cast<arma::uword>(i));
            if (s2 < 0.0 || s2 > 1.0)
                throw std::invalid_argument("split_estimate: sigma^2 outside [0,1]");
            const arma::cx_mat g = gaussian_matrix(rng, h.n_rows, h.n_cols);
            arma::cx_mat est = (1.0 - s2) * h - std::sqrt(s2 * (1.0 - s2)) * g;
            out.errors.push_back(h - est);
            out.estimates.push_back(std::move(est));
        }
    }
    return out;
}

} // namespace iasim
