// SPDX-License-Identifier: MIT
//
// Node placement for line, grid, and random deployments; log-distance path
// loss and the large-scale link-gain matrix.
#pragma once

#include <armadillo>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace iasim {

// Transmitter/receiver coordinates in meters plus the receiver-to-transmitter
// association. In line/grid modes the association is the identity; in random
// mode each receiver is served by its nearest non-conflicting transmitter and
// the remaining transmitters stay idle.
struct NodePlacement {
    std::vector<std::array<double, 2>> tx_positions;
    std::vector<std::array<double, 2>> rx_positions;
    std::vector<int> association; // rx index -> tx index
    std::vector<int> active_tx;   // sorted tx indices that serve a receiver
};

// Log-distance path loss: reference_loss_db + 10·exponent·log10(r).
struct PathLossModel {
    double reference_loss_db = 30.0;
    double exponent = 3.2;
};

// K×K matrix of linear received-power gains; entry (k,i) is the gain from the
// transmitter serving receiver i to receiver k, so P_r(k,i) = P_t · gains(k,i)
// and the direct link of receiver k sits at (k,k).
using LinkGainMatrix = arma::mat;

// K transmitter/receiver pairs in a row of cell_side×cell_side squares;
// transmitters at square centers, receivers uniform within their square.
NodePlacement place_line(int K, double cell_side, std::uint64_t rng_seed);

// rows×cols arrangement of squares, same per-cell layout as place_line.
NodePlacement place_grid(int rows, int cols, double cell_side, std::uint64_t rng_seed);

// n_tx transmitters and K receivers uniform in a side×side square. Each
// receiver picks its nearest transmitter (ties to the lowest index); when two
// receivers pick the same transmitter the closer one keeps it and the others
// are reassigned greedily by receiver index to their nearest unclaimed
// transmitter. Requires n_tx >= K >= 2.
NodePlacement place_random(int n_tx, int K, double side, std::uint64_t rng_seed);

// Nearest-transmitter association with the conflict rule above. Exposed
// separately so the rule is testable on handcrafted coordinates. Returns
// (association, active_tx).
std::pair<std::vector<int>, std::vector<int>>
associate_nearest(const std::vector<std::array<double, 2>>& tx_positions,
                  const std::vector<std::array<double, 2>>& rx_positions);

// Path loss in dB at distance r meters; distances below 1 m clamp to the
// reference distance. Throws std::domain_error for r <= 0.
double path_loss_db(double r, const PathLossModel& model);

// Large-scale gains for all (receiver, serving-transmitter) pairs, re-indexed
// so entry (k,k) is receiver k's direct link. Coincident nodes sit at the
// reference distance.
LinkGainMatrix link_gains(const NodePlacement& placement, const PathLossModel& model);

} // namespace iasim
