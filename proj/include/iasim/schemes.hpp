// SPDX-License-Identifier: MIT
//
// Closed-form effective average sum-rates for the three transmission schemes:
// spatial interference alignment, TDMA, and uncoordinated SU-MIMO, each with
// its training overhead folded in, plus a numerical check of the
// imperfect-CSI mutual-information lower bound they are built on.

#pragma once

#include <armadillo>
#include <string>

#include "iasim/channel.hpp"
#include "iasim/specfun.hpp"

namespace iasim {

enum class Scheme { IA, TDMA, SU_MIMO };

// Stable display/CSV name: "IA", "TDMA", "SU_MIMO".
const char* scheme_name(Scheme s);

// Inverse of scheme_name; throws std::invalid_argument on unknown names.
Scheme scheme_from_name(const std::string& name);

struct SchemeConfig {
    Scheme scheme = Scheme::IA;
    int K = 4;        // transmitter-receiver pairs
    int Nr = 5;       // receive antennas
    int Nt = 5;       // transmit antennas
    int d = 2;        // streams per user (IA)
    int tau_coh = 100; // coherence interval in symbols
    // Training budget follows the minimum-pilot pattern: K*Nr reverse plus
    // K*d forward pilots for IA, K*Nt pilots for the baselines.
    bool minimum_training = true;
};

struct SumRateResult {
    arma::vec per_user;           // post-overhead rates, bits/channel use
    double total = 0.0;           // sum of per_user
    double overhead_fraction = 0.0; // training symbols / tau_coh
};

// Effective average sum-rate of spatial interference alignment:
// max(0, (tau - K(Nr+d))/tau) * sum_k f(snr_k, d, d) with snr_k the
// post-alignment effective SNR under residual-CSI self-interference.
// Requires Nr == Nt and a feasible (K, N, d) triple.
SumRateResult ia_sum_rate(const arma::mat& gains, const CsiErrorModel& err,
                          double p_t_mw, double p_noise_mw, const SchemeConfig& cfg);

// Effective average sum-rate of TDMA: each user gets a 1/K time share,
// interference-free, with f evaluated at (min(Nr,Nt), max(Nr,Nt)).
SumRateResult tdma_sum_rate(const arma::mat& gains, const CsiErrorModel& err,
                            double p_t_mw, double p_noise_mw, const SchemeConfig& cfg);

// Effective average sum-rate of uncoordinated SU-MIMO: simultaneous
// transmission, cross-link powers land in the interference denominator.
SumRateResult su_mimo_sum_rate(const arma::mat& gains, const CsiErrorModel& err,
                               double p_t_mw, double p_noise_mw,
                               const SchemeConfig& cfg);

// Dispatch on cfg.scheme.
SumRateResult sum_rate(const arma::mat& gains, const CsiErrorModel& err, double p_t_mw,
                       double p_noise_mw, const SchemeConfig& cfg);

// Evaluates the imperfect-CSI mutual-information lower bound
//   log2 det(I_Nr + [P(1-s2)/(Nt(P s2 + n0))] * Ht Ht*)
// with Ht the unit-variance-normalized channel estimate, and cross-checks it
// against the equivalent pre-identity form
//   log2 det(I_Nt + (P/Nt) * He* Rn^{-1} He),  Rn = (P s2 + n0) I,
// throwing std::runtime_error if the two disagree beyond 1e-10 relative.
// Returns the bound in bits/channel use.
double mi_lower_bound_check(const arma::cx_mat& estimate, double p_t_mw, int nt,
                            double err_var, double p_noise_mw);

} // namespace iasim
