// SPDX-License-Identifier: MIT

#include "iasim/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "iasim/rng.hpp"

namespace iasim {

namespace {

double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

} // namespace

NodePlacement place_line(int K, double cell_side, std::uint64_t rng_seed) {
    if (K < 2)
        throw std::invalid_argument("place_line: need at least two pairs");
    if (!(cell_side > 0.0))
        throw std::invalid_argument("place_line: cell_side must be > 0");
    Rng rng(rng_seed);
    NodePlacement p;
    p.tx_positions.reserve(K);
    p.rx_positions.reserve(K);
    for (int k = 0; k < K; ++k) {
        p.tx_positions.push_back({(k + 0.5) * cell_side, 0.5 * cell_side});
        const double x = rng.uniform(k * cell_side, (k + 1) * cell_side);
        const double y = rng.uniform(0.0, cell_side);
        p.rx_positions.push_back({x, y});
        p.association.push_back(k);
        p.active_tx.push_back(k);
    }
    return p;
}

NodePlacement place_grid(int rows, int cols, double cell_side, std::uint64_t rng_seed) {
    if (rows < 1 || cols < 1 || rows * cols < 2)
        throw std::invalid_argument("place_grid: need rows*cols >= 2");
    if (!(cell_side > 0.0))
        throw std::invalid_argument("place_grid: cell_side must be > 0");
    Rng rng(rng_seed);
    NodePlacement p;
    const int K = rows * cols;
    p.tx_positions.reserve(K);
    p.rx_positions.reserve(K);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int k = r * cols + c;
            p.tx_positions.push_back({(c + 0.5) * cell_side, (r + 0.5) * cell_side});
            const double x = rng.uniform(c * cell_side, (c + 1) * cell_side);
            const double y = rng.uniform(r * cell_side, (r + 1) * cell_side);
            p.rx_positions.push_back({x, y});
            p.association.push_back(k);
            p.active_tx.push_back(k);
        }
    }
    return p;
}

std::pair<std::vector<int>, std::vector<int>>
associate_nearest(const std::vector<std::array<double, 2>>& tx_positions,
                  const std::vector<std::array<double, 2>>& rx_positions) {
    const int n_tx = static_cast<int>(tx_positions.size());
    const int K = static_cast<int>(rx_positions.size());
    if (n_tx < K)
        throw std::invalid_argument("associate_nearest: need n_tx >= K");

    auto nearest = [&](int k, const std::vector<char>& claimed) {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n_tx; ++i) {
            if (claimed[static_cast<std::size_t>(i)])
                continue;
            const double d = dist2(rx_positions[static_cast<std::size_t>(k)],
                                   tx_positions[static_cast<std::size_t>(i)]);
            if (d < best_d) { // strict: ties keep the lowest index
                best_d = d;
                best = i;
            }
        }
        return best;
    };

    std::vector<char> none(static_cast<std::size_t>(n_tx), 0);
    std::vector<int> want(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k)
        want[static_cast<std::size_t>(k)] = nearest(k, none);

    // Conflict resolution: the closest claimant keeps the transmitter (ties
    // to the lowest receiver index); the rest reassign greedily by index.
    std::vector<int> assoc(static_cast<std::size_t>(K), -1);
    std::vector<char> claimed(static_cast<std::size_t>(n_tx), 0);
    for (int i = 0; i < n_tx; ++i) {
        int winner = -1;
        double win_d = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            if (want[static_cast<std::size_t>(k)] != i)
                continue;
            const double d = dist2(rx_positions[static_cast<std::size_t>(k)],
                                   tx_positions[static_cast<std::size_t>(i)]);
            if (d < win_d) {
                win_d = d;
                winner = k;
            }
        }
        if (winner >= 0) {
            assoc[static_cast<std::size_t>(winner)] = i;
            claimed[static_cast<std::size_t>(i)] = 1;
        }
    }
    for (int k = 0; k < K; ++k) {
        if (assoc[static_cast<std::size_t>(k)] >= 0)
            continue;
        const int i = nearest(k, claimed);
        assoc[static_cast<std::size_t>(k)] = i;
        claimed[static_cast<std::size_t>(i)] = 1;
    }

    std::vector<int> active = assoc;
    std::sort(active.begin(), active.end());
    return {assoc, active};
}

NodePlacement place_random(int n_tx, int K, double side, std::uint64_t rng_seed) {
    if (K < 2)
        throw std::invalid_argument("place_random: need at least two receivers");
    if (n_tx < K)
        throw std::invalid_argument("place_random: need n_tx >= K");
    if (!(side > 0.0))
        throw std::invalid_argument("place_random: side must be > 0");
    Rng rng(rng_seed);
    NodePlacement p;
    p.tx_positions.reserve(n_tx);
    for (int i = 0; i < n_tx; ++i) {
        const double x = rng.uniform(0.0, side);
        const double y = rng.uniform(0.0, side);
        p.tx_positions.push_back({x, y});
    }
    p.rx_positions.reserve(K);
    for (int k = 0; k < K; ++k) {
        const double x = rng.uniform(0.0, side);
        const double y = rng.uniform(0.0, side);
        p.rx_positions.push_back({x, y});
    }
    auto [assoc, active] = associate_nearest(p.tx_positions, p.rx_positions);
    p.association = std::move(assoc);
    p.active_tx = std::move(active);
    return p;
}

double path_loss_db(double r, const PathLossModel& model) {
    if (!(r > 0.0))
        throw std::domain_error("path_loss_db: distance must be > 0");
    if (!(model.exponent > 0.0))
        throw std::domain_error("path_loss_db: exponent must be > 0");
    if (model.reference_loss_db < 0.0)
        throw std::domain_error("path_loss_db: reference loss must be >= 0");
    return model.reference_loss_db + 10.0 * model.exponent * std::log10(std::max(r, 1.0));
}

LinkGainMatrix link_gains(const NodePlacement& placement, const PathLossModel& model) {
    const int K = static_cast<int>(placement.rx_positions.size());
    if (static_cast<int>(placement.association.size()) != K)
        throw std::invalid_argument("link_gains: association size mismatch");
    LinkGainMatrix gains(static_cast<arma::uword>(K), static_cast<arma::uword>(K));
    for (int k = 0; k < K; ++k) {
        for (int i = 0; i < K; ++i) {
            const int tx = placement.association[static_cast<std::size_t>(i)];
            const double r = std::sqrt(dist2(placement.rx_positions[static_cast<std::size_t>(k)],
                                             placement.tx_positions[static_cast<std::size_t>(tx)]));
            const double pl = path_loss_db(std::max(r, 1.0), model);
            gains(static_cast<arma::uword>(k), static_cast<arma::uword>(i)) =
                std::pow(10.0, -pl / 10.0);
        }
    }
    return gains;
}

} // namespace iasim
