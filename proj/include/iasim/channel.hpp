// SPDX-License-Identifier: MIT
//
// Small-scale Rayleigh channel draws, training-based MMSE estimation error,
// and the per-user effective SNRs of the three transmission schemes.
#pragma once

#include <armadillo>
#include <cmath>
#include <cstdint>
#include <vector>

#include "iasim/topology.hpp"

namespace iasim {

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

// K×K array of Nr×Nt channel matrices, row-major: at(k,i) is the channel from
// transmitter i to receiver k.
struct ChannelSet {
    int K = 0;
    int Nr = 0;
    int Nt = 0;
    std::vector<arma::cx_mat> mats;

    const arma::cx_mat& at(int k, int i) const {
        return mats[static_cast<std::size_t>(k * K + i)];
    }
    arma::cx_mat& at(int k, int i) { return mats[static_cast<std::size_t>(k * K + i)]; }
};

// Per-link MMSE estimation-error variances plus the pilot budgets that
// produced them.
struct CsiErrorModel {
    arma::mat error_variance; // K×K, sigma^2 in [0,1]
    double tau_rp = 0.0;      // reverse pilot symbols
    double tau_fp = 0.0;      // forward pilot symbols
};

// MMSE estimates and the matching error terms for one set of links; the two
// parts are statistically independent with entry variances (1 - sigma^2) and
// sigma^2 respectively.
struct EstimatedChannelSet {
    int K = 0;
    std::vector<arma::cx_mat> estimates;
    std::vector<arma::cx_mat> errors;

    const arma::cx_mat& estimate(int k, int i) const {
        return estimates[static_cast<std::size_t>(k * K + i)];
    }
    const arma::cx_mat& error(int k, int i) const {
        return errors[static_cast<std::size_t>(k * K + i)];
    }
};

// Fresh i.i.d. CN(0,1) channel draw for all K·K links; deterministic per seed.
ChannelSet draw_channels(int K, int Nr, int Nt, std::uint64_t rng_seed);

// MMSE error variance of one link: p_noise / (p_noise + pilot_len·p_r/streams).
// With the minimum pilot budget (pilot_len = K·streams) this reduces to
// p_noise / (p_noise + K·p_r). All inputs must be > 0.
double estimation_error_variance(double pilot_len, double p_r, int streams_or_antennas,
                                 double p_noise);

// Error-variance matrix under minimum training: tau_rp = K·Nr reverse and
// tau_fp = K·d forward pilot symbols, giving sigma^2(k,i) =
// p_noise / (p_noise + K·P_r(k,i)) for every link and phase.
CsiErrorModel csi_error_minimum_training(const LinkGainMatrix& gains, double p_t_mw,
                                         double p_noise_mw, int nr, int d);

// All-zero error variances (perfect CSI limit).
CsiErrorModel csi_error_perfect(int K);

// Post-combining effective SNR of user k under interference alignment:
// P_r(k,k)(1-s2(k,k)) / (sum_i P_r(k,i)·s2(k,i) + p_noise); the sum includes
// the direct link i = k.
double effective_snr_ia(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                        double p_t_mw, double p_noise_mw);

// TDMA: only the direct link's estimation error self-interferes.
double effective_snr_tdma(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                          double p_t_mw, double p_noise_mw);

// SU-MIMO: full co-channel interference enters the denominator unattenuated.
double effective_snr_su_mimo(int k, const LinkGainMatrix& gains, const CsiErrorModel& err,
                             double p_t_mw, double p_noise_mw);

// Splits each link matrix H into an MMSE estimate and an independent error,
// H_hat = (1-s2)·H - sqrt(s2(1-s2))·G with G a fresh CN(0,1) draw, so that
// H_hat has entry variance 1-s2, the error H - H_hat has variance s2, and the
// two are uncorrelated. Works for full (Nr×Nt) or precoded (Nr×d) links.
EstimatedChannelSet split_estimate(const std::vector<arma::cx_mat>& links, int K,
                                   const CsiErrorModel& err, std::uint64_t rng_seed);

inline EstimatedChannelSet split_estimate(const ChannelSet& channels,
                                          const CsiErrorModel& err,
                                          std::uint64_t rng_seed) {
    return split_estimate(channels.mats, channels.K, err, rng_seed);
}

} // namespace iasim
