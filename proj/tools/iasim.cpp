// SPDX-License-Identifier: MIT
//
// Command-line front end: closed-form sweeps, matrix-level validation,
// topology export, and a quick invariant selftest.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "iasim/alignment.hpp"
#include "iasim/channel.hpp"
#include "iasim/harness.hpp"
#include "iasim/rng.hpp"
#include "iasim/schemes.hpp"
#include "iasim/specfun.hpp"
#include "iasim/topology.hpp"

namespace {

// Per-key CLI overrides stored as raw strings and funneled through
// apply_key so flags and config-file lines share one parser.
class OverrideSet {
  public:
    void add(CLI::App* app, const std::string& flag, const std::string& key,
             const std::string& help) {
        auto* opt = app->add_option(flag, values_[key], help);
        opts_.emplace_back(key, opt);
    }

    void apply(iasim::SimConfig& cfg) const {
        for (const auto& [key, opt] : opts_)
            if (opt->count() > 0)
                iasim::apply_key(cfg, key, values_.at(key));
    }

  private:
    std::map<std::string, std::string> values_;
    std::vector<std::pair<std::string, CLI::Option*>> opts_;
};

struct SubCtx {
    CLI::App* sub = nullptr;
    std::string config;
    std::string out;
    OverrideSet overrides;
};

void add_common(CLI::App* sub, SubCtx& ctx) {
    ctx.sub = sub;
    sub->add_option("--config", ctx.config, "flat key=value config file");
    sub->add_option("--out", ctx.out, "output CSV path");
    auto& ov = ctx.overrides;
    ov.add(sub, "--seed", "master_seed", "master RNG seed");
    ov.add(sub, "--topology", "topology", "line | grid | random");
    ov.add(sub, "--rows", "rows", "grid rows");
    ov.add(sub, "--cols", "cols", "grid columns");
    ov.add(sub, "--n-tx", "n_tx", "random-topology transmitter count");
    ov.add(sub, "--cell-side", "cell_side", "cell edge, meters");
    ov.add(sub, "--side", "side", "random-topology area edge, meters (0 = auto)");
    ov.add(sub, "--K", "K", "transmitter-receiver pairs");
    ov.add(sub, "--N", "N", "antennas per node (Nr = Nt)");
    ov.add(sub, "--d", "d", "streams per user");
    ov.add(sub, "--gamma", "gamma", "path-loss exponent");
    ov.add(sub, "--tau-coh", "tau_coh", "coherence interval, symbols");
    ov.add(sub, "--p-noise-dbm", "p_noise_dbm", "noise power, dBm");
    ov.add(sub, "--p-t", "p_t_dbm", "sweep: comma list or start:step:stop, dBm");
    ov.add(sub, "--realizations", "realizations", "topology realizations");
    ov.add(sub, "--realization-offset", "realization_offset", "first sub-seed index");
    ov.add(sub, "--schemes", "schemes", "comma list from IA,TDMA,SU_MIMO");
    ov.add(sub, "--validation-blocks", "validation_blocks", "channel blocks per point");
    ov.add(sub, "--perfect-csi", "perfect_csi", "true | false");
    ov.add(sub, "--threads", "threads", "worker threads (0 = hardware)");
}

iasim::SimConfig build_config(const SubCtx& ctx) {
    iasim::SimConfig cfg = ctx.config.empty() ? iasim::default_config()
                                              : iasim::parse_config_file(ctx.config);
    ctx.overrides.apply(cfg);
    return cfg;
}

void check(bool cond, const std::string& what) {
    if (!cond)
        throw std::runtime_error("selftest failed: " + what);
    std::printf("selftest: %s ... ok\n", what.c_str());
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0e-300, std::abs(a), std::abs(b)});
}

void run_selftest() {
    using namespace iasim;

    check(close_rel(expint(1, 1.0), 0.21938393439552027, 1.0e-12), "expint E1(1)");
    check(close_rel(expint(5, 10.0), 3.0897289142536863e-6, 1.0e-12), "expint E5(10)");
    check(close_rel(expint_scaled(2, 700.0), 0.0014245071893793158, 1.0e-12),
          "scaled expint E2(700)");

    {
        const double z = 0.7;
        bool ok = true;
        for (int n = 1; n <= 9; ++n) {
            const double lhs = expint(n + 1, z);
            const double rhs = (std::exp(-z) - z * expint(n, z)) / n;
            ok = ok && close_rel(lhs, rhs, 1.0e-10);
        }
        check(ok, "expint recurrence n<=10");
    }

    check(close_rel(ergodic_rate(10.0, 2, 4), 8.04851541552, 1.0e-9),
          "ergodic_rate(10,2,4)");
    check(ergodic_rate(2.0, 2, 2) < ergodic_rate(4.0, 2, 2), "rate monotone in snr");

    {
        const McRateEstimate a = mc_rate_oracle(1.0, 2, 2, 20000, 11);
        const McRateEstimate b = mc_rate_oracle(1.0, 2, 2, 20000, 11);
        check(a.mean == b.mean && a.std_err == b.std_err, "mc oracle deterministic");
        const double closed = ergodic_rate(1.0, 2, 2);
        check(std::abs(a.mean - closed) <= 3.0 * a.std_err, "mc oracle vs closed form");
    }

    {
        Rng rng(5);
        const arma::cx_mat g = gaussian_matrix(rng, 5, 5);
        const arma::cx_mat h = 0.5 * (g + g.t());
        arma::vec w;
        arma::cx_mat x;
        hermitian_eig(h, w, x);
        arma::vec wr;
        arma::cx_mat xr;
        arma::eig_sym(wr, xr, h);
        check(arma::abs(w - wr).max() < 1.0e-10 &&
                  arma::norm(x * arma::diagmat(w) * x.t() - h, "fro") < 1.0e-10,
              "hermitian_eig vs LAPACK");
    }

    {
        const int K = 3, N = 2, d = 1;
        const ChannelSet ch = draw_channels(K, N, N, 21);
        const arma::mat powers(K, K, arma::fill::ones);
        const AlignmentSolution sol = min_leakage_solve(ch.mats, powers, d, {}, 31);
        bool unit = true;
        for (const auto& v : sol.precoders)
            unit = unit && arma::norm(arma::cx_mat(v.t() * v) -
                                          arma::cx_mat(arma::eye<arma::cx_mat>(d, d)),
                                      "fro") < 1.0e-12;
        bool mono = true;
        for (std::size_t i = 1; i < sol.trace.size(); ++i)
            mono = mono && sol.trace[i] <= sol.trace[i - 1];
        check(sol.leakage <= 1.0e-8 && unit && mono, "min_leakage_solve (3,2,1)");

        std::vector<arma::cx_mat> row(K);
        for (int i = 0; i < K; ++i)
            row[static_cast<std::size_t>(i)] = ch.at(0, i) * sol.precoders[static_cast<std::size_t>(i)];
        const arma::cx_mat u = zf_combiner(row, 0);
        double residual = 0.0;
        for (int i = 1; i < K; ++i)
            residual += arma::norm(arma::cx_mat(u.t() * row[static_cast<std::size_t>(i)]), "fro");
        check(residual < 1.0e-4, "zf_combiner annihilates aligned interference");
    }

    {
        Rng rng(9);
        const arma::cx_mat est = gaussian_matrix(rng, 4, 4) * std::sqrt(0.8);
        const double bits = mi_lower_bound_check(est, 10.0, 4, 0.2, 1.0);
        check(std::isfinite(bits) && bits > 0.0, "mi lower-bound identity");
    }

    {
        SimConfig cfg = default_config();
        cfg.topology.kind = TopologyKind::Grid;
        cfg.topology.rows = 1;
        cfg.topology.cols = 2;
        cfg.K = 2;
        cfg.N = 2;
        cfg.d = 1;
        cfg.realizations = 3;
        cfg.p_t_dbm = {0.0, 10.0};
        const SweepResult a = run_sweep(cfg);
        SimConfig cfg2 = cfg;
        cfg2.threads = 2;
        const SweepResult b = run_sweep(cfg2);
        bool same = a.rows.size() == b.rows.size();
        for (std::size_t i = 0; same && i < a.rows.size(); ++i)
            same = a.rows[i].mean_sum_rate == b.rows[i].mean_sum_rate &&
                   a.rows[i].std_err == b.rows[i].std_err;
        check(same, "run_sweep thread-count invariant");

        bool threw = false;
        try {
            SimConfig bad = cfg;
            apply_key(bad, "no_such_key", "1");
        } catch (const config_error&) {
            threw = true;
        }
        check(threw, "unknown config key rejected");
    }

    std::printf("selftest: all checks passed\n");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Effective sum-rate simulator for dense MIMO interference networks"};
    app.require_subcommand(1);

    SubCtx run_ctx, validate_ctx, topo_ctx;
    add_common(app.add_subcommand("run", "closed-form effective sum-rate sweep"), run_ctx);
    add_common(app.add_subcommand("validate", "analytic vs matrix-level Monte Carlo"),
               validate_ctx);
    add_common(app.add_subcommand("topology", "export node placement CSV"), topo_ctx);
    CLI::App* selftest_sub = app.add_subcommand("selftest", "run built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_ctx.sub->parsed()) {
            const iasim::SimConfig cfg = build_config(run_ctx);
            const iasim::SweepResult result = iasim::run_sweep(cfg);
            const std::string out = run_ctx.out.empty() ? "sweep.csv" : run_ctx.out;
            iasim::write_csv(result, out);
            std::printf("wrote %zu rows (%zu powers x %zu schemes, %d realizations) to %s\n",
                        result.rows.size(), cfg.p_t_dbm.size(), cfg.schemes.size(),
                        cfg.realizations, out.c_str());
        } else if (validate_ctx.sub->parsed()) {
            iasim::SimConfig cfg = build_config(validate_ctx);
            cfg.validation = true;
            const iasim::ValidationResult result = iasim::run_validation(cfg);
            const std::string out = validate_ctx.out.empty() ? "validation.csv"
                                                             : validate_ctx.out;
            iasim::write_csv(result, out);
            std::printf("%8s %14s %14s %10s %10s\n", "p_t_dbm", "analytic", "simulated",
                        "gap_pct", "nonconv");
            for (const auto& row : result.rows)
                std::printf("%8g %14.6f %14.6f %+9.3f%% %6d/%d\n", row.p_t_dbm,
                            row.analytic, row.simulated, 100.0 * row.rel_gap,
                            row.nonconverged, row.blocks);
            std::printf("wrote %s\n", out.c_str());
        } else if (topo_ctx.sub->parsed()) {
            const iasim::SimConfig cfg = build_config(topo_ctx);
            iasim::validate_config(cfg);
            const std::uint64_t sub =
                iasim::derive_seed(cfg.master_seed, cfg.realization_offset);
            const iasim::NodePlacement placement =
                iasim::make_placement(cfg, iasim::derive_seed(sub, 0));
            const std::string out = topo_ctx.out.empty() ? "topology.csv" : topo_ctx.out;
            iasim::export_topology(placement, out);
            std::printf("wrote %zu tx + %zu rx nodes to %s\n",
                        placement.tx_positions.size(), placement.rx_positions.size(),
                        out.c_str());
        } else if (selftest_sub->parsed()) {
            run_selftest();
        }
    } catch (const iasim::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
