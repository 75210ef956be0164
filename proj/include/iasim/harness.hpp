// SPDX-License-Identifier: MIT
//
// Simulation configuration, Monte Carlo orchestration over topology
// realizations and channel blocks, and CSV emission.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "iasim/channel.hpp"
#include "iasim/schemes.hpp"
#include "iasim/topology.hpp"

namespace iasim {

// Configuration-level failures (bad keys, bad values, inconsistent settings).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TopologyKind { Line, Grid, Random };

struct TopologySpec {
    TopologyKind kind = TopologyKind::Grid;
    int rows = 2;           // grid
    int cols = 2;           // grid
    int n_tx = 12;          // random: candidate transmitters
    double cell_side = 5.0; // line/grid cell edge, meters
    double side = 0.0;      // random area edge; 0 selects cell_side*sqrt(K)
};

struct SimConfig {
    TopologySpec topology;
    int K = 4;
    int N = 5; // Nr = Nt
    int d = 2;
    double gamma = 3.2;
    int tau_coh = 100;
    double p_noise_dbm = -95.0;
    std::vector<double> p_t_dbm;          // transmit power sweep
    int realizations = 100;
    std::uint64_t realization_offset = 0; // first sub-seed index (split runs)
    std::vector<Scheme> schemes;
    std::uint64_t master_seed = 1;
    bool validation = false;  // matrix-level Monte Carlo path
    int validation_blocks = 1000;
    bool perfect_csi = false; // force zero estimation error
    int threads = 0;          // 0 selects hardware concurrency
};

// Default configuration: 2×2 grid, K=4, N=5, d=2, gamma=3.2,
// tau_coh=100, noise -95 dBm, sweep 0..30 dBm in 2 dB steps, 100
// realizations, all three schemes.
SimConfig default_config();

// Applies one `key = value` setting; throws config_error on unknown keys or
// unparseable values. Keys mirror serialize_config output 1:1.
void apply_key(SimConfig& cfg, const std::string& key, const std::string& value);

// Defaults overlaid with the flat key=value file at `path` ('#' comments).
SimConfig parse_config_file(const std::string& path);

// Canonical key=value rendering of every config field (stable order).
std::string serialize_config(const SimConfig& cfg);

// Cross-field consistency checks; throws config_error.
void validate_config(const SimConfig& cfg);

// Node placement for cfg's topology with the given seed.
NodePlacement make_placement(const SimConfig& cfg, std::uint64_t rng_seed);

struct SweepRow {
    double p_t_dbm = 0.0;
    Scheme scheme = Scheme::IA;
    double mean_sum_rate = 0.0; // bits/channel use, post-overhead
    double std_err = 0.0;
    int realizations = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // power ascending, scheme name ascending
    std::string config_echo;    // canonical config actually used
    std::uint64_t master_seed = 0;
};

// Closed-form sweep: averages each selected scheme's effective sum-rate over
// topology realizations at every sweep power. Deterministic given
// (config, master_seed); realization r uses sub-seed
// derive_seed(master_seed, realization_offset + r) so split runs compose.
SweepResult run_sweep(const SimConfig& cfg);

struct ValidationRow {
    double p_t_dbm = 0.0;
    double analytic = 0.0;  // closed-form effective sum-rate
    double simulated = 0.0; // matrix-level Monte Carlo mean
    double std_err = 0.0;
    double rel_gap = 0.0;   // (simulated - analytic) / analytic
    int nonconverged = 0;   // solver runs that exhausted their budget
    int blocks = 0;
};

struct ValidationResult {
    std::vector<ValidationRow> rows; // power ascending
    std::string config_echo;
    std::uint64_t master_seed = 0;
};

// Matrix-level validation of the closed-form IA sum-rate on one placement:
// per channel block, precoders come from a minimum-leakage solve on noisy
// reverse-training estimates, combiners from the estimated forward
// interference covariance, and rates are evaluated on the true channels.
ValidationResult run_validation(const SimConfig& cfg);

// UTF-8 CSV with header `p_t_dbm,scheme,mean_sum_rate_bits,std_err,
// realizations`, 9 significant digits, plus a `<path>.meta` sibling holding
// the canonical config (master seed included).
void write_csv(const SweepResult& result, const std::string& path);

// Validation table: `p_t_dbm,analytic_sum_rate_bits,simulated_mean_bits,
// std_err,rel_gap,nonconverged,blocks` plus the `.meta` sibling.
void write_csv(const ValidationResult& result, const std::string& path);

// Node positions and associations, columns
// `node_type,index,x_m,y_m,associated_tx` (tx rows first).
void export_topology(const NodePlacement& placement, const std::string& path);

} // namespace iasim
