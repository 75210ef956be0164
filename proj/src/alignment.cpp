// SPDX-License-Identifier: MIT

#include "iasim/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "iasim/rng.hpp"

namespace iasim {

namespace {

using cxd = std::complex<double>;

// Make each column's largest-magnitude entry real positive (fixed sign
// convention for reproducible eigen/singular vectors).
void fix_column_phases(arma::cx_mat& m) {
    for (arma::uword c = 0; c < m.n_cols; ++c) {
        arma::uword idx = 0;
        double best = -1.0;
        for (arma::uword r = 0; r < m.n_rows; ++r) {
            const double a = std::abs(m(r, c));
            if (a > best) {
                best = a;
                idx = r;
            }
        }
        if (best > 0.0)
            m.col(c) *= std::conj(m(idx, c)) / best;
    }
}

// Nearest matrix with orthonormal columns along the QR geodesic.
arma::cx_mat orthonormal_retract(const arma::cx_mat& m) {
    arma::cx_mat q, r;
    if (!arma::qr_econ(q, r, m))
        throw std::runtime_error("orthonormal_retract: QR failed");
    for (arma::uword c = 0; c < q.n_cols; ++c) {
        const cxd rc = r(c, c);
        const double a = std::abs(rc);
        if (a > 0.0)
            q.col(c) *= std::conj(rc) / a;
    }
    return q;
}

struct System {
    const std::vector<arma::cx_mat>* channels;
    const arma::mat* powers;
    int K;
    int N;
    int d;

    const arma::cx_mat& h(int k, int i) const {
        return (*channels)[static_cast<std::size_t>(k * K + i)];
    }
    double p(int k, int i) const {
        return (*powers)(static_cast<arma::uword>(k), static_cast<arma::uword>(i));
    }
};

// Interference covariance at receiver k for given precoders.
arma::cx_mat interference_cov(const System& sys, const std::vector<arma::cx_mat>& v,
                              int k) {
    arma::cx_mat q(static_cast<arma::uword>(sys.N), static_cast<arma::uword>(sys.N),
                   arma::fill::zeros);
    for (int i = 0; i < sys.K; ++i) {
        if (i == k)
            continue;
        const arma::cx_mat t = sys.h(k, i) * v[static_cast<std::size_t>(i)];
        q += (sys.p(k, i) / sys.d) * (t * t.t());
    }
    return q;
}

// Reverse-network interference covariance at transmitter k for given
// combiners (reverse channel of link (i,k) is H_ik^*).
arma::cx_mat reverse_cov(const System& sys, const std::vector<arma::cx_mat>& u, int k) {
    arma::cx_mat q(static_cast<arma::uword>(sys.N), static_cast<arma::uword>(sys.N),
                   arma::fill::zeros);
    for (int i = 0; i < sys.K; ++i) {
        if (i == k)
            continue;
        const arma::cx_mat t = sys.h(i, k).t() * u[static_cast<std::size_t>(i)];
        q += (sys.p(i, k) / sys.d) * (t * t.t());
    }
    return q;
}

// Updates one side's subspaces to the d least-dominant eigenvectors of the
// (forward or reverse) interference covariances. The d smallest eigenvalues
// sum to that receiver's post-update leakage, so `leak_sum` returns the total
// leakage of the swept side against `other` with no extra evaluation.
std::vector<arma::cx_mat> least_eigvec_sweep(const System& sys,
                                             const std::vector<arma::cx_mat>& other,
                                             bool forward, double& leak_sum) {
    std::vector<arma::cx_mat> out(static_cast<std::size_t>(sys.K));
    arma::vec w;
    arma::cx_mat x;
    double acc = 0.0;
    for (int k = 0; k < sys.K; ++k) {
        const arma::cx_mat q =
            forward ? interference_cov(sys, other, k) : reverse_cov(sys, other, k);
        hermitian_eig(q, w, x);
        out[static_cast<std::size_t>(k)] = x.cols(0, static_cast<arma::uword>(sys.d) - 1);
        for (int j = 0; j < sys.d; ++j)
            acc += w(static_cast<arma::uword>(j));
    }
    leak_sum = std::max(0.0, acc);
    return out;
}

double total_leakage(const System& sys, const std::vector<arma::cx_mat>& v,
                     const std::vector<arma::cx_mat>& u) {
    double sum = 0.0;
    for (int k = 0; k < sys.K; ++k) {
        for (int i = 0; i < sys.K; ++i) {
            if (i == k)
                continue;
            const arma::cx_mat m =
                u[static_cast<std::size_t>(k)].t() * sys.h(k, i) * v[static_cast<std::size_t>(i)];
            sum += (sys.p(k, i) / sys.d) * std::pow(arma::norm(m, "fro"), 2);
        }
    }
    return sum;
}

// Rotation R minimizing ||prev·R - cur||_F (orthogonal Procrustes).
arma::cx_mat procrustes_rotation(const arma::cx_mat& prev, const arma::cx_mat& cur) {
    arma::cx_mat a, b;
    arma::vec s;
    if (!arma::svd(a, s, b, arma::cx_mat(prev.t() * cur)))
        throw std::runtime_error("procrustes_rotation: SVD failed");
    return a * b.t();
}

} // namespace

void hermitian_eig(const arma::cx_mat& a, arma::vec& eigenvalues,
                   arma::cx_mat& eigenvectors) {
    if (a.n_rows != a.n_cols)
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    const arma::uword n = a.n_rows;
    arma::cx_mat m = a;
    eigenvectors.eye(n, n);
    eigenvalues.set_size(n);
    if (n == 0)
        return;

    const double fro = arma::norm(a, "fro");
    const double stop_off_sq = (fro > 0.0) ? std::pow(1.0e-15 * fro, 2) : 0.0;

    for (int sweep = 0; sweep < 80; ++sweep) {
        double off_sq = 0.0;
        for (arma::uword p = 0; p + 1 < n; ++p)
            for (arma::uword q = p + 1; q < n; ++q)
                off_sq += std::norm(m(p, q));
        if (off_sq <= stop_off_sq)
            break;

        for (arma::uword p = 0; p + 1 < n; ++p) {
            for (arma::uword q = p + 1; q < n; ++q) {
                const cxd apq = m(p, q);
                const double b = std::abs(apq);
                if (b == 0.0)
                    continue;
                const double app = m(p, p).real();
                const double aqq = m(q, q).real();
                const cxd u = apq / b;
                const double tau = (aqq - app) / (2.0 * b);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cxd ucs = std::conj(u) * s;
                const cxd ucc = std::conj(u) * c;
                const cxd us = u * s;
                const cxd uc = u * c;

                // m <- m·G with G = [[c, s],[-conj(u)s, conj(u)c]] in the (p,q) plane
                for (arma::uword r = 0; r < n; ++r) {
                    const cxd mp = m(r, p);
                    const cxd mq = m(r, q);
                    m(r, p) = c * mp - ucs * mq;
                    m(r, q) = s * mp + ucc * mq;
                }
                // m <- G*·m
                for (arma::uword r = 0; r < n; ++r) {
                    const cxd mp = m(p, r);
                    const cxd mq = m(q, r);
                    m(p, r) = c * mp - us * mq;
                    m(q, r) = s * mp + uc * mq;
                }
                m(p, p) = app - t * b;
                m(q, q) = aqq + t * b;
                m(p, q) = 0.0;
                m(q, p) = 0.0;

                for (arma::uword r = 0; r < n; ++r) {
                    const cxd vp = eigenvectors(r, p);
                    const cxd vq = eigenvectors(r, q);
                    eigenvectors(r, p) = c * vp - ucs * vq;
                    eigenvectors(r, q) = s * vp + ucc * vq;
                }
            }
        }
    }

    std::vector<arma::uword> order(n);
    std::iota(order.begin(), order.end(), arma::uword{0});
    std::stable_sort(order.begin(), order.end(), [&](arma::uword i, arma::uword j) {
        return m(i, i).real() < m(j, j).real();
    });
    arma::cx_mat sorted(n, n);
    for (arma::uword c = 0; c < n; ++c) {
        eigenvalues(c) = m(order[c], order[c]).real();
        sorted.col(c) = eigenvectors.col(order[c]);
    }
    fix_column_phases(sorted);
    eigenvectors = std::move(sorted);
}

bool feasible(int K, int N, int d) {
    if (K < 1 || N < 1 || d < 1)
        throw std::invalid_argument("feasible: arguments must be positive");
    return 2 * N >= d * (K + 1);
}

double leakage(const std::vector<arma::cx_mat>& channels, const arma::mat& powers,
               const std::vector<arma::cx_mat>& precoders,
               const std::vector<arma::cx_mat>& combiners) {
    const int K = static_cast<int>(powers.n_rows);
    if (powers.n_rows != powers.n_cols ||
        channels.size() != static_cast<std::size_t>(K) * K ||
        precoders.size() != static_cast<std::size_t>(K) ||
        combiners.size() != static_cast<std::size_t>(K))
        throw std::invalid_argument("leakage: inconsistent dimensions");
    const int d = static_cast<int>(precoders[0].n_cols);
    const System sys{&channels, &powers, K, static_cast<int>(channels[0].n_rows), d};
    return total_leakage(sys, precoders, combiners);
}

AlignmentSolution min_leakage_solve(const std::vector<arma::cx_mat>& channels,
                                    const arma::mat& powers, int d,
                                    const SolverOptions& opt, std::uint64_t rng_seed) {
    const int K = static_cast<int>(powers.n_rows);
    if (powers.n_rows != powers.n_cols || K < 1)
        throw std::invalid_argument("min_leakage_solve: powers must be square");
    if (channels.size() != static_cast<std::size_t>(K) * K)
        throw std::invalid_argument("min_leakage_solve: need K*K channel matrices");
    const int N = static_cast<int>(channels[0].n_rows);
    for (const auto& h : channels)
        if (static_cast<int>(h.n_rows) != N || static_cast<int>(h.n_cols) != N)
            throw std::invalid_argument("min_leakage_solve: channels must be square N×N");
    if (d < 1 || d > N)
        throw std::invalid_argument("min_leakage_solve: need 1 <= d <= N");
    if (!feasible(K, N, d))
        throw std::invalid_argument("min_leakage_solve: infeasible configuration");
    if (powers.min() < 0.0)
        throw std::invalid_argument("min_leakage_solve: powers must be non-negative");
    if (opt.max_iter < 0 || opt.tol < 0.0 || opt.abs_tol < 0.0)
        throw std::invalid_argument("min_leakage_solve: invalid solver options");

    const System sys{&channels, &powers, K, N, d};
    Rng rng(rng_seed);

    AlignmentSolution sol;
    sol.precoders.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        sol.precoders.push_back(haar_semiunitary(rng, static_cast<arma::uword>(N),
                                                 static_cast<arma::uword>(d)));
    double leak = 0.0;
    sol.combiners = least_eigvec_sweep(sys, sol.precoders, true, leak);
    sol.trace.push_back(leak);
    sol.converged = leak < opt.abs_tol;

    std::vector<arma::cx_mat> v_prev;
    bool have_prev = false;

    for (int it = 1; it <= opt.max_iter && !sol.converged; ++it) {
        const double leak_start = leak;
        const bool accel = opt.accel_period > 0 && it % opt.accel_period == 0 && have_prev;

        double l1 = 0.0;
        std::vector<arma::cx_mat> v_cand =
            least_eigvec_sweep(sys, sol.combiners, false, l1);
        if (!accel) {
            // plain iteration: commit each half-step if it does not regress
            std::vector<arma::cx_mat> v_old = sol.precoders;
            if (l1 <= leak) {
                sol.precoders = std::move(v_cand);
                leak = l1;
            }
            v_prev = std::move(v_old);
            have_prev = true;
            sol.trace.push_back(leak);
            if (leak < opt.abs_tol) {
                sol.converged = true;
                sol.iterations_used = it;
                break;
            }
            double l2 = 0.0;
            std::vector<arma::cx_mat> u_cand =
                least_eigvec_sweep(sys, sol.precoders, true, l2);
            if (l2 <= leak) {
                sol.combiners = std::move(u_cand);
                leak = l2;
            }
            sol.trace.push_back(leak);
        } else {
            // plain candidate for this iteration
            double l_plain = 0.0;
            std::vector<arma::cx_mat> u_plain =
                least_eigvec_sweep(sys, v_cand, true, l_plain);

            // extrapolated candidate: step along the aligned iterate difference
            std::vector<arma::cx_mat> v_ex(static_cast<std::size_t>(K));
            for (int k = 0; k < K; ++k) {
                const arma::cx_mat& vc = v_cand[static_cast<std::size_t>(k)];
                const arma::cx_mat& vp = v_prev[static_cast<std::size_t>(k)];
                const arma::cx_mat aligned = vp * procrustes_rotation(vp, vc);
                v_ex[static_cast<std::size_t>(k)] =
                    orthonormal_retract(vc + opt.accel_step * (vc - aligned));
            }
            double l_ex = 0.0;
            std::vector<arma::cx_mat> u_ex = least_eigvec_sweep(sys, v_ex, true, l_ex);

            std::vector<arma::cx_mat>* v_best = (l_ex < l_plain) ? &v_ex : &v_cand;
            std::vector<arma::cx_mat>* u_best = (l_ex < l_plain) ? &u_ex : &u_plain;
            const double l_best = std::min(l_ex, l_plain);

            v_prev = std::move(sol.precoders);
            if (l_best <= leak) {
                sol.precoders = std::move(*v_best);
                sol.combiners = std::move(*u_best);
                leak = l_best;
            } else {
                sol.precoders = v_prev; // keep current iterate
            }
            sol.trace.push_back(leak);
        }

        sol.iterations_used = it;
        if (leak < opt.abs_tol) {
            sol.converged = true;
            break;
        }
        if (leak_start - leak < opt.tol * leak_start) {
            sol.converged = true; // stalled: relative decrease below tolerance
            break;
        }
    }

    sol.leakage = leak;
    return sol;
}

arma::cx_mat zf_combiner(const std::vector<arma::cx_mat>& precoded_row, int k) {
    const int K = static_cast<int>(precoded_row.size());
    if (K < 1 || k < 0 || k >= K)
        throw std::invalid_argument("zf_combiner: bad user index");
    const arma::uword nr = precoded_row[0].n_rows;
    const arma::uword d = precoded_row[0].n_cols;
    for (const auto& m : precoded_row)
        if (m.n_rows != nr || m.n_cols != d)
            throw std::invalid_argument("zf_combiner: inconsistent shapes");
    if (d > nr)
        throw std::invalid_argument("zf_combiner: need d <= Nr");

    arma::cx_mat stacked(nr, static_cast<arma::uword>(K - 1) * d);
    arma::uword col = 0;
    for (int i = 0; i < K; ++i) {
        if (i == k)
            continue;
        stacked.cols(col, col + d - 1) = precoded_row[static_cast<std::size_t>(i)];
        col += d;
    }

    arma::uword rank = 0;
    arma::cx_mat null_basis;
    if (stacked.n_cols == 0 || arma::norm(stacked, "fro") == 0.0) {
        null_basis.eye(nr, nr);
    } else {
        arma::cx_mat u, v;
        arma::vec s;
        if (!arma::svd(u, s, v, stacked))
            throw std::runtime_error("zf_combiner: SVD failed");
        const double thresh = 1.0e-4 * s(0); // below this a direction counts as aligned away
        for (arma::uword i = 0; i < s.n_elem; ++i)
            if (s(i) > thresh)
                ++rank;
        if (rank > nr - d)
            throw alignment_error("zf_combiner: interference subspace too large");
        null_basis = u.cols(rank, nr - 1);
    }

    if (d == nr && rank == 0) {
        arma::cx_mat id;
        id.eye(nr, nr);
        return id; // degenerate interference-free convention
    }

    // restrict the null-space basis so the direct link keeps rank d
    const arma::cx_mat proj = null_basis.t() * precoded_row[static_cast<std::size_t>(k)];
    arma::cx_mat p, w;
    arma::vec s;
    if (!arma::svd(p, s, w, proj))
        throw std::runtime_error("zf_combiner: SVD failed");
    if (s.n_elem < d || !(s(d - 1) > 1.0e-10 * s(0)))
        throw alignment_error("zf_combiner: direct channel rank-deficient after projection");
    arma::cx_mat out = null_basis * p.cols(0, d - 1);
    fix_column_phases(out);
    return out;
}

arma::cx_mat min_leakage_combiner(const std::vector<arma::cx_mat>& precoded_row,
                                  const arma::vec& weights, int k, int d) {
    const int K = static_cast<int>(precoded_row.size());
    if (K < 1 || k < 0 || k >= K)
        throw std::invalid_argument("min_leakage_combiner: bad user index");
    if (static_cast<int>(weights.n_elem) != K)
        throw std::invalid_argument("min_leakage_combiner: weights size mismatch");
    const arma::uword nr = precoded_row[0].n_rows;
    if (d < 1 || static_cast<arma::uword>(d) > nr)
        throw std::invalid_argument("min_leakage_combiner: need 1 <= d <= Nr");

    arma::cx_mat q(nr, nr, arma::fill::zeros);
    for (int i = 0; i < K; ++i) {
        if (i == k)
            continue;
        const arma::cx_mat& a = precoded_row[static_cast<std::size_t>(i)];
        q += (weights(static_cast<arma::uword>(i)) / d) * (a * a.t());
    }
    arma::vec w;
    arma::cx_mat x;
    hermitian_eig(q, w, x);
    return x.cols(0, static_cast<arma::uword>(d) - 1);
}

arma::vec instantaneous_rates(const std::vector<arma::cx_mat>& true_channels,
                              const arma::mat& powers,
                              const std::vector<arma::cx_mat>& precoders,
                              const std::vector<arma::cx_mat>& combiners,
                              double p_noise_mw) {
    const int K = static_cast<int>(powers.n_rows);
    if (powers.n_rows != powers.n_cols ||
        true_channels.size() != static_cast<std::size_t>(K) * K ||
        precoders.size() != static_cast<std::size_t>(K) ||
        combiners.size() != static_cast<std::size_t>(K))
        throw std::invalid_argument("instantaneous_rates: inconsistent dimensions");
    if (!(p_noise_mw > 0.0))
        throw std::invalid_argument("instantaneous_rates: noise power must be > 0");
    const int d = static_cast<int>(precoders[0].n_cols);

    arma::vec rates(static_cast<arma::uword>(K));
    for (int k = 0; k < K; ++k) {
        const arma::cx_mat& u = combiners[static_cast<std::size_t>(k)];
        arma::cx_mat q(static_cast<arma::uword>(d), static_cast<arma::uword>(d),
                       arma::fill::zeros);
        q.diag() += p_noise_mw;
        for (int i = 0; i < K; ++i) {
            if (i == k)
                continue;
            const arma::cx_mat m =
                std::sqrt(powers(static_cast<arma::uword>(k), static_cast<arma::uword>(i)) / d) *
                (u.t() * true_channels[static_cast<std::size_t>(k * K + i)] *
                 precoders[static_cast<std::size_t>(i)]);
            q += m * m.t();
        }
        const arma::cx_mat dmat =
            std::sqrt(powers(static_cast<arma::uword>(k), static_cast<arma::uword>(k)) / d) *
            (u.t() * true_channels[static_cast<std::size_t>(k * K + k)] *
             precoders[static_cast<std::size_t>(k)]);
        const arma::cx_mat lc = arma::chol(q, "lower");
        const arma::cx_mat b = arma::solve(arma::trimatl(lc), dmat);
        arma::cx_mat a = b.t() * b;
        a.diag() += 1.0;
        a = 0.5 * (a + a.t());
        rates(static_cast<arma::uword>(k)) =
            arma::log_det_sympd(a) * std::numbers::log2e;
    }
    return rates;
}

} // namespace iasim
