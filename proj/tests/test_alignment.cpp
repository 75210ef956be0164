// SPDX-License-Identifier: MIT
//
// Jacobi eigensolver, minimum-leakage alignment solver, combiner extraction,
// and instantaneous rates.
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "iasim/alignment.hpp"
#include "iasim/channel.hpp"
#include "iasim/rng.hpp"

namespace {

std::vector<arma::cx_mat> random_channels(int k, int n, std::uint64_t seed) {
    return iasim::draw_channels(k, n, n, seed).mats;
}

double unitarity_defect(const arma::cx_mat& u) {
    return arma::norm(u.t() * u - arma::eye<arma::cx_mat>(u.n_cols, u.n_cols), "fro");
}

// Largest weighted per-link residual ||U_k^* H_ki V_i||_F over i != k.
double worst_cross_talk(const std::vector<arma::cx_mat>& ch, int k_users,
                        const iasim::AlignmentSolution& sol) {
    double worst = 0.0;
    for (int k = 0; k < k_users; ++k)
        for (int i = 0; i < k_users; ++i)
            if (i != k)
                worst = std::max(worst,
                                 arma::norm(sol.combiners[static_cast<std::size_t>(k)].t() *
                                                ch[static_cast<std::size_t>(k * k_users + i)] *
                                                sol.precoders[static_cast<std::size_t>(i)],
                                            "fro"));
    return worst;
}

} // namespace

TEST_CASE("hermitian_eig matches LAPACK across sizes") {
    for (int n = 2; n <= 8; ++n) {
        iasim::Rng rng(static_cast<std::uint64_t>(100 + n));
        const arma::cx_mat g = iasim::gaussian_matrix(rng, n, n);
        const arma::cx_mat a = g * g.t(); // Hermitian PSD

        arma::vec w;
        arma::cx_mat x;
        iasim::hermitian_eig(a, w, x);

        arma::vec w_ref;
        arma::cx_mat x_ref;
        REQUIRE(arma::eig_sym(w_ref, x_ref, a));

        CAPTURE(n);
        CHECK(arma::norm(w - w_ref, "inf") < 1e-12 * std::abs(w_ref.max()));
        CHECK(std::is_sorted(w.begin(), w.end()));
        CHECK(unitarity_defect(x) < 1e-13);
        CHECK(arma::norm(a * x - x * arma::diagmat(w), "fro") < 1e-12 * arma::norm(a, "fro"));
    }
}

TEST_CASE("hermitian_eig fixes phases deterministically") {
    iasim::Rng rng(7);
    const arma::cx_mat g = iasim::gaussian_matrix(rng, 5, 5);
    const arma::cx_mat a = g * g.t();
    arma::vec w1, w2;
    arma::cx_mat x1, x2;
    iasim::hermitian_eig(a, w1, x1);
    iasim::hermitian_eig(a, w2, x2);
    CHECK(arma::approx_equal(x1, x2, "absdiff", 0.0));
    // Largest-magnitude entry of every eigenvector is real positive.
    for (arma::uword c = 0; c < x1.n_cols; ++c) {
        const arma::uword imax = arma::abs(x1.col(c)).index_max();
        CHECK(std::abs(std::imag(x1(imax, c))) < 1e-15);
        CHECK(std::real(x1(imax, c)) > 0.0);
    }
    CHECK_THROWS_AS(iasim::hermitian_eig(arma::cx_mat(2, 3, arma::fill::zeros), w1, x1),
                    std::invalid_argument);
}

TEST_CASE("feasible implements 2N >= d(K+1)") {
    CHECK(iasim::feasible(3, 2, 1));      // 4 >= 4
    CHECK(iasim::feasible(4, 5, 2));      // 10 >= 10
    CHECK(iasim::feasible(2, 2, 1));      // 4 >= 3
    CHECK_FALSE(iasim::feasible(4, 2, 1)); // 4 < 5
    CHECK_FALSE(iasim::feasible(4, 5, 3)); // 10 < 15
    CHECK_FALSE(iasim::feasible(3, 3, 2)); // 6 < 8
    CHECK_THROWS_AS(iasim::feasible(0, 2, 1), std::invalid_argument);
    CHECK_THROWS_AS(iasim::feasible(3, 2, 0), std::invalid_argument);
}

TEST_CASE("min_leakage_solve aligns the K=3, N=2, d=1 system") {
    const auto ch = random_channels(3, 2, 21);
    const arma::mat powers(3, 3, arma::fill::ones);
    const auto sol = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 22);

    CHECK(sol.converged);
    CHECK(sol.leakage <= 1e-8);
    CHECK(sol.precoders.size() == 3);
    CHECK(sol.combiners.size() == 3);
    for (const auto& v : sol.precoders) {
        CHECK(v.n_rows == 2);
        CHECK(v.n_cols == 1);
        CHECK(unitarity_defect(v) < 1e-12);
    }
    for (const auto& u : sol.combiners) CHECK(unitarity_defect(u) < 1e-12);

    // Leakage is consistent with the standalone evaluation and the residual
    // cross-talk actually vanished.
    CHECK(iasim::leakage(sol, ch, powers) == doctest::Approx(sol.leakage).epsilon(1e-6));
    CHECK(worst_cross_talk(ch, 3, sol) < 1e-3);

    // Trace: recorded, non-increasing, ends at the reported leakage.
    REQUIRE(sol.trace.size() >= 2);
    for (std::size_t i = 1; i < sol.trace.size(); ++i)
        REQUIRE(sol.trace[i] <= sol.trace[i - 1]);
    CHECK(sol.trace.back() == doctest::Approx(sol.leakage).epsilon(1e-12));
}

TEST_CASE("min_leakage_solve is deterministic per seed") {
    const auto ch = random_channels(3, 2, 33);
    const arma::mat powers(3, 3, arma::fill::ones);
    const auto a = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 5);
    const auto b = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 5);
    CHECK(a.leakage == b.leakage);
    CHECK(a.iterations_used == b.iterations_used);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(arma::approx_equal(a.precoders[k], b.precoders[k], "absdiff", 0.0));
    const auto c = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 6);
    CHECK_FALSE(arma::approx_equal(a.precoders[0], c.precoders[0], "absdiff", 1e-12));
}

TEST_CASE("min_leakage_solve nails a structurally aligned system immediately") {
    // Cross channels H_ki = x_k y_i^*: all interference at receiver k lives in
    // span{x_k}, so the orthogonal combiner cancels it exactly.
    const int k_users = 3, n = 2;
    iasim::Rng rng(55);
    std::vector<arma::cx_mat> ch(static_cast<std::size_t>(k_users * k_users));
    std::vector<arma::cx_vec> x(static_cast<std::size_t>(k_users));
    for (auto& xv : x) xv = arma::cx_vec(iasim::gaussian_matrix(rng, n, 1));
    for (int k = 0; k < k_users; ++k)
        for (int i = 0; i < k_users; ++i) {
            if (i == k) {
                ch[static_cast<std::size_t>(k * k_users + i)] = iasim::gaussian_matrix(rng, n, n);
            } else {
                const arma::cx_vec y = arma::cx_vec(iasim::gaussian_matrix(rng, n, 1));
                ch[static_cast<std::size_t>(k * k_users + i)] =
                    x[static_cast<std::size_t>(k)] * y.t();
            }
        }
    const arma::mat powers(k_users, k_users, arma::fill::ones);
    const auto sol = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 3);
    CHECK(sol.converged);
    CHECK(sol.leakage < 1e-12);
    CHECK(sol.iterations_used <= 1);

    // On exactly aligned interference the ZF combiner annihilates to working
    // precision and keeps the direct link at full stream rank.
    for (int k = 0; k < k_users; ++k) {
        std::vector<arma::cx_mat> row(static_cast<std::size_t>(k_users));
        double stack_norm = 0.0;
        for (int i = 0; i < k_users; ++i) {
            row[static_cast<std::size_t>(i)] = ch[static_cast<std::size_t>(k * k_users + i)] *
                                               sol.precoders[static_cast<std::size_t>(i)];
            if (i != k)
                stack_norm += arma::norm(row[static_cast<std::size_t>(i)], "fro");
        }
        const arma::cx_mat u = iasim::zf_combiner(row, k);
        for (int i = 0; i < k_users; ++i)
            if (i != k)
                CHECK(arma::norm(u.t() * row[static_cast<std::size_t>(i)], "fro") <=
                      1e-10 * stack_norm);
        CHECK(arma::rank(arma::cx_mat(u.t() * row[static_cast<std::size_t>(k)])) == 1);
    }
}

TEST_CASE("min_leakage_solve rejects bad arguments") {
    const auto ch = random_channels(3, 2, 1);
    const arma::mat powers(3, 3, arma::fill::ones);
    const iasim::SolverOptions opt;

    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, arma::mat(3, 2, arma::fill::ones), 1, opt, 0),
                    std::invalid_argument);
    auto short_ch = ch;
    short_ch.pop_back();
    CHECK_THROWS_AS(iasim::min_leakage_solve(short_ch, powers, 1, opt, 0),
                    std::invalid_argument);
    auto ragged = ch;
    ragged[4] = arma::cx_mat(3, 2, arma::fill::zeros);
    CHECK_THROWS_AS(iasim::min_leakage_solve(ragged, powers, 1, opt, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, powers, 0, opt, 0), std::invalid_argument);
    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, powers, 3, opt, 0), std::invalid_argument);
    // K=4, N=2, d=1 violates 2N >= d(K+1).
    CHECK_THROWS_AS(iasim::min_leakage_solve(random_channels(4, 2, 2),
                                             arma::mat(4, 4, arma::fill::ones), 1, opt, 0),
                    std::invalid_argument);
    arma::mat neg = powers;
    neg(0, 1) = -1.0;
    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, neg, 1, opt, 0), std::invalid_argument);
    iasim::SolverOptions bad = opt;
    bad.max_iter = -1;
    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, powers, 1, bad, 0), std::invalid_argument);
    bad = opt;
    bad.tol = -1e-3;
    CHECK_THROWS_AS(iasim::min_leakage_solve(ch, powers, 1, bad, 0), std::invalid_argument);
    // max_iter = 0 is the degenerate "initial sweep only" run.
    iasim::SolverOptions init_only = opt;
    init_only.max_iter = 0;
    CHECK(iasim::min_leakage_solve(ch, powers, 1, init_only, 0).iterations_used == 0);
}

TEST_CASE("zf_combiner cancels aligned interference") {
    const auto ch = random_channels(3, 2, 77);
    const arma::mat powers(3, 3, arma::fill::ones);
    const auto sol = iasim::min_leakage_solve(ch, powers, 1, iasim::SolverOptions{}, 78);
    REQUIRE(sol.leakage <= 1e-8);

    for (int k = 0; k < 3; ++k) {
        std::vector<arma::cx_mat> row(3);
        double stack_norm = 0.0;
        for (int i = 0; i < 3; ++i) {
            row[static_cast<std::size_t>(i)] =
                ch[static_cast<std::size_t>(k * 3 + i)] * sol.precoders[static_cast<std::size_t>(i)];
            if (i != k)
                stack_norm += arma::norm(row[static_cast<std::size_t>(i)], "fro");
        }
        const arma::cx_mat u = iasim::zf_combiner(row, k);
        CHECK(u.n_rows == 2);
        CHECK(u.n_cols == 1);
        CHECK(unitarity_defect(u) < 1e-12);
        for (int i = 0; i < 3; ++i)
            if (i != k)
                CHECK(arma::norm(u.t() * row[static_cast<std::size_t>(i)], "fro") <
                      2e-4 * stack_norm);
        // Same one-dimensional subspace the solver found.
        const arma::cx_mat us = sol.combiners[static_cast<std::size_t>(k)];
        CHECK(arma::norm(u * u.t() - us * us.t(), "fro") < 1e-3);

        // The estimated-interference combiner agrees as well.
        const arma::cx_mat um = iasim::min_leakage_combiner(row, arma::vec(3, arma::fill::ones), k, 1);
        CHECK(unitarity_defect(um) < 1e-12);
        CHECK(arma::norm(um * um.t() - u * u.t(), "fro") < 1e-3);
    }
}

TEST_CASE("zf_combiner conventions and failure modes") {
    iasim::Rng rng(5);

    // Zero interference, d < Nr: the direct link picks d directions.
    std::vector<arma::cx_mat> row = {iasim::gaussian_matrix(rng, 3, 2),
                                     arma::cx_mat(3, 2, arma::fill::zeros)};
    const arma::cx_mat u = iasim::zf_combiner(row, 0);
    CHECK(u.n_rows == 3);
    CHECK(u.n_cols == 2);
    CHECK(unitarity_defect(u) < 1e-12);

    // Zero interference, d = Nr: identity by convention.
    std::vector<arma::cx_mat> row_full = {iasim::gaussian_matrix(rng, 2, 2),
                                          arma::cx_mat(2, 2, arma::fill::zeros)};
    CHECK(arma::approx_equal(iasim::zf_combiner(row_full, 0),
                             arma::eye<arma::cx_mat>(2, 2), "absdiff", 0.0));

    // Unaligned random interference exceeding Nr - d dimensions.
    std::vector<arma::cx_mat> busy = {iasim::gaussian_matrix(rng, 2, 1),
                                      iasim::gaussian_matrix(rng, 2, 1),
                                      iasim::gaussian_matrix(rng, 2, 1)};
    CHECK_THROWS_AS(iasim::zf_combiner(busy, 0), iasim::alignment_error);

    // Direct channel loses rank after projection.
    arma::cx_mat thin(3, 2, arma::fill::zeros);
    thin.col(0) = arma::cx_vec(iasim::gaussian_matrix(rng, 3, 1));
    thin.col(1) = thin.col(0); // rank one
    std::vector<arma::cx_mat> defective = {thin, arma::cx_mat(3, 2, arma::fill::zeros)};
    CHECK_THROWS_AS(iasim::zf_combiner(defective, 0), iasim::alignment_error);

    CHECK_THROWS_AS(iasim::zf_combiner(row, 2), std::invalid_argument);
    std::vector<arma::cx_mat> tall = {iasim::gaussian_matrix(rng, 2, 3),
                                      arma::cx_mat(2, 3, arma::fill::zeros)};
    CHECK_THROWS_AS(iasim::zf_combiner(tall, 0), std::invalid_argument);
}

TEST_CASE("min_leakage_combiner minimizes the weighted residual") {
    iasim::Rng rng(9);
    std::vector<arma::cx_mat> row = {iasim::gaussian_matrix(rng, 4, 2),
                                     iasim::gaussian_matrix(rng, 4, 2),
                                     iasim::gaussian_matrix(rng, 4, 2)};
    const arma::vec w = {1.0, 0.5, 2.0};
    const arma::cx_mat u = iasim::min_leakage_combiner(row, w, 0, 2);
    CHECK(u.n_rows == 4);
    CHECK(u.n_cols == 2);
    CHECK(unitarity_defect(u) < 1e-12);

    // Its residual equals the sum of the two smallest eigenvalues of the
    // weighted interference covariance; any other orthonormal pair does worse.
    arma::cx_mat q(4, 4, arma::fill::zeros);
    for (int i = 1; i < 3; ++i)
        q += (w(static_cast<arma::uword>(i)) / 2.0) * row[static_cast<std::size_t>(i)] *
             row[static_cast<std::size_t>(i)].t();
    const double res = std::real(arma::trace(u.t() * q * u));
    arma::vec ev;
    arma::cx_mat evec;
    iasim::hermitian_eig(q, ev, evec);
    CHECK(res == doctest::Approx(ev(0) + ev(1)).epsilon(1e-12));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        iasim::Rng r2(seed);
        const arma::cx_mat other = iasim::haar_semiunitary(r2, 4, 2);
        CHECK(std::real(arma::trace(other.t() * q * other)) >= res - 1e-12);
    }

    CHECK_THROWS_AS(iasim::min_leakage_combiner(row, arma::vec(2, arma::fill::ones), 0, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(iasim::min_leakage_combiner(row, w, 3, 2), std::invalid_argument);
    CHECK_THROWS_AS(iasim::min_leakage_combiner(row, w, 0, 5), std::invalid_argument);
}

TEST_CASE("instantaneous_rates reduces to log2 det in the clean case") {
    // Two users, zero cross power: rate_k = log2 det(I + P/(d Pn) (U*HV)*(U*HV)).
    iasim::Rng rng(31);
    const int n = 4, d = 2;
    std::vector<arma::cx_mat> ch = {iasim::gaussian_matrix(rng, n, n),
                                    iasim::gaussian_matrix(rng, n, n),
                                    iasim::gaussian_matrix(rng, n, n),
                                    iasim::gaussian_matrix(rng, n, n)};
    std::vector<arma::cx_mat> v = {iasim::haar_semiunitary(rng, n, d),
                                   iasim::haar_semiunitary(rng, n, d)};
    std::vector<arma::cx_mat> u = {iasim::haar_semiunitary(rng, n, d),
                                   iasim::haar_semiunitary(rng, n, d)};
    arma::mat powers(2, 2, arma::fill::zeros);
    powers(0, 0) = 2.0;
    powers(1, 1) = 3.0;
    const double pn = 0.25;

    const arma::vec rates = iasim::instantaneous_rates(ch, powers, v, u, pn);
    REQUIRE(rates.n_elem == 2);
    for (int k = 0; k < 2; ++k) {
        const arma::cx_mat d_eff = std::sqrt(powers(static_cast<arma::uword>(k),
                                                    static_cast<arma::uword>(k)) / d) *
                                   u[static_cast<std::size_t>(k)].t() *
                                   ch[static_cast<std::size_t>(k * 2 + k)] *
                                   v[static_cast<std::size_t>(k)];
        const arma::cx_mat m = arma::eye<arma::cx_mat>(d, d) + d_eff.t() * d_eff / pn;
        const double want = std::log2(std::abs(arma::det(m)));
        CHECK(rates(static_cast<arma::uword>(k)) == doctest::Approx(want).epsilon(1e-12));
    }

    // Zero direct power: zero rate.
    arma::mat dead = powers;
    dead(0, 0) = 0.0;
    CHECK(iasim::instantaneous_rates(ch, dead, v, u, pn)(0) == 0.0);

    // Joint rescaling of powers and noise leaves rates unchanged.
    const arma::vec scaled = iasim::instantaneous_rates(ch, 10.0 * powers, v, u, 10.0 * pn);
    CHECK(scaled(0) == doctest::Approx(rates(0)).epsilon(1e-12));
    CHECK(scaled(1) == doctest::Approx(rates(1)).epsilon(1e-12));

    // Interference reduces the rate.
    arma::mat interf = powers;
    interf(0, 1) = 5.0;
    CHECK(iasim::instantaneous_rates(ch, interf, v, u, pn)(0) < rates(0));

    CHECK_THROWS_AS(iasim::instantaneous_rates(ch, powers, v, u, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(iasim::instantaneous_rates(ch, arma::mat(3, 3, arma::fill::ones), v, u, pn),
                    std::invalid_argument);
}
