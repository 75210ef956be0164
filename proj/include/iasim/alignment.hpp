// SPDX-License-Identifier: MIT
//
// Interference-alignment feasibility, the iterative minimum-leakage
// precoder/combiner solver, zero-forcing combiner extraction, and
// per-realization instantaneous rates for the Monte Carlo validation path.
#pragma once

#include <armadillo>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace iasim {

// Alignment-specific runtime failures (rank-deficient ZF inputs and similar).
struct alignment_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Feasibility of d streams per user on a K-user N×N channel: 2N >= d(K+1).
bool feasible(int K, int N, int d);

// Result of the alternating-minimization solver. `trace` records the total
// leakage after every committed subspace update (two entries per plain
// iteration, one per accepted extrapolation step); it is non-increasing.
struct AlignmentSolution {
    std::vector<arma::cx_mat> precoders; // V_k, Nt×d, orthonormal columns
    std::vector<arma::cx_mat> combiners; // U_k, Nr×d, orthonormal columns
    double leakage = 0.0;
    int iterations_used = 0;
    bool converged = false;
    std::vector<double> trace;
};

struct SolverOptions {
    int max_iter = 5000;
    double tol = 1e-10;          // stop when the per-iteration relative decrease falls below
    double abs_tol = 1e-12;      // stop when total leakage falls below
    int accel_period = 5;        // subspace extrapolation cadence (0 disables)
    double accel_step = 12.0;    // extrapolation length along the iterate difference
};

// Alternating minimization of the total interference leakage
// sum_k tr(U_k^* Q_k U_k), Q_k = sum_{i != k} (P(k,i)/d)·H_ki V_i V_i^* H_ki^*,
// with combiner and precoder sweeps solved exactly via eigenvectors of the
// forward and reverse interference covariances. Every accel_period iterations
// a Grassmannian extrapolation of the precoders is tried and kept only if it
// beats the plain step, so the committed leakage stays non-increasing.
// `channels` holds K·K row-major Nr×Nt matrices (channels[k*K+i] = H_ki) and
// `powers` the per-link received powers P(k,i). Requires a feasible square
// system. Deterministic per seed.
AlignmentSolution min_leakage_solve(const std::vector<arma::cx_mat>& channels,
                                    const arma::mat& powers, int d,
                                    const SolverOptions& opt, std::uint64_t rng_seed);

inline AlignmentSolution min_leakage_solve(const std::vector<arma::cx_mat>& channels,
                                           const arma::mat& powers, int d, int max_iter,
                                           double tol, std::uint64_t rng_seed) {
    SolverOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    return min_leakage_solve(channels, powers, d, opt, rng_seed);
}

// Total interference leakage of a given precoder/combiner set.
double leakage(const std::vector<arma::cx_mat>& channels, const arma::mat& powers,
               const std::vector<arma::cx_mat>& precoders,
               const std::vector<arma::cx_mat>& combiners);

inline double leakage(const AlignmentSolution& sol,
                      const std::vector<arma::cx_mat>& channels,
                      const arma::mat& powers) {
    return leakage(channels, powers, sol.precoders, sol.combiners);
}

// Zero-forcing combiner for receiver k from the K precoded estimates
// A_hat(k,i) (Nr×d each): spans the orthogonal complement of the interference
// columns, restricted so the direct link keeps rank d. Singular values below
// 1e-4 of the largest count as aligned away. Throws alignment_error when the
// interference rank exceeds Nr-d or the projected direct channel loses rank.
// Convention: d = Nr with zero interference returns the identity.
arma::cx_mat zf_combiner(const std::vector<arma::cx_mat>& precoded_row, int k);

// Combiner minimizing the estimated residual interference at receiver k: the
// d least-dominant eigenvectors of sum_{i != k} w(i)/d · A_hat(k,i) A_hat(k,i)^*.
// Coincides with zf_combiner (up to a d×d rotation) when the estimates are
// exactly aligned, and stays well-defined on noisy estimates where exact
// zero-forcing is rank-infeasible.
arma::cx_mat min_leakage_combiner(const std::vector<arma::cx_mat>& precoded_row,
                                  const arma::vec& weights, int k, int d);

// Per-user achievable rates (bits/channel use) of fixed precoders/combiners
// on the true channels: log2 det(I + D^*(Q_int + p_noise·I)^{-1} D) with
// D = sqrt(P(k,k)/d)·U_k^* H_kk V_k, residual interference treated as noise.
arma::vec instantaneous_rates(const std::vector<arma::cx_mat>& true_channels,
                              const arma::mat& powers,
                              const std::vector<arma::cx_mat>& precoders,
                              const std::vector<arma::cx_mat>& combiners,
                              double p_noise_mw);

inline arma::vec instantaneous_rates(const std::vector<arma::cx_mat>& true_channels,
                                     const arma::mat& powers,
                                     const AlignmentSolution& sol, double p_noise_mw) {
    return instantaneous_rates(true_channels, powers, sol.precoders, sol.combiners,
                               p_noise_mw);
}

// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations:
// eigenvalues ascending, each eigenvector's largest-magnitude entry made real
// positive. Deterministic replacement for LAPACK in the solver's hot loop;
// exposed for tests.
void hermitian_eig(const arma::cx_mat& a, arma::vec& eigenvalues,
                   arma::cx_mat& eigenvectors);

} // namespace iasim
