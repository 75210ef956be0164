// SPDX-License-Identifier: MIT
//
// Config parsing and validation, the sweep/validation drivers, seeding
// contracts, and CSV emission.
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iasim/harness.hpp"
#include "iasim/rng.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/iasim_test_" + name) {}
    ~TempFile() {
        std::remove(path.c_str());
        std::remove((path + ".meta").c_str());
    }
};

iasim::SimConfig small_line_config() {
    // K=3 pairs on a line, N=2, d=1: feasible and fast.
    iasim::SimConfig cfg = iasim::default_config();
    cfg.topology.kind = iasim::TopologyKind::Line;
    cfg.K = 3;
    cfg.N = 2;
    cfg.d = 1;
    cfg.p_t_dbm = {10.0};
    cfg.realizations = 4;
    cfg.threads = 1;
    return cfg;
}

} // namespace

TEST_CASE("default_config matches the documented defaults") {
    const auto cfg = iasim::default_config();
    CHECK(cfg.K == 4);
    CHECK(cfg.N == 5);
    CHECK(cfg.d == 2);
    CHECK(cfg.gamma == 3.2);
    CHECK(cfg.tau_coh == 100);
    CHECK(cfg.p_noise_dbm == -95.0);
    CHECK(cfg.topology.kind == iasim::TopologyKind::Grid);
    REQUIRE(cfg.p_t_dbm.size() == 16);
    CHECK(cfg.p_t_dbm.front() == 0.0);
    CHECK(cfg.p_t_dbm.back() == 30.0);
    REQUIRE(cfg.schemes.size() == 3);
    CHECK_NOTHROW(iasim::validate_config(cfg));
}

TEST_CASE("apply_key parses every exposed field") {
    auto cfg = iasim::default_config();
    iasim::apply_key(cfg, "topology", "random");
    CHECK(cfg.topology.kind == iasim::TopologyKind::Random);
    iasim::apply_key(cfg, "n_tx", "9");
    CHECK(cfg.topology.n_tx == 9);
    iasim::apply_key(cfg, "side", "12.5");
    CHECK(cfg.topology.side == 12.5);
    iasim::apply_key(cfg, "gamma", "3.5");
    CHECK(cfg.gamma == 3.5);
    iasim::apply_key(cfg, "tau_coh", "150");
    CHECK(cfg.tau_coh == 150);
    iasim::apply_key(cfg, "p_t_dbm", "0,10,20");
    CHECK(cfg.p_t_dbm == std::vector<double>{0.0, 10.0, 20.0});
    iasim::apply_key(cfg, "p_t_dbm", "0:5:30");
    REQUIRE(cfg.p_t_dbm.size() == 7);
    CHECK(cfg.p_t_dbm[3] == 15.0);
    iasim::apply_key(cfg, "schemes", "IA,TDMA");
    REQUIRE(cfg.schemes.size() == 2);
    iasim::apply_key(cfg, "master_seed", "42");
    CHECK(cfg.master_seed == 42);
    iasim::apply_key(cfg, "perfect_csi", "true");
    CHECK(cfg.perfect_csi);
    iasim::apply_key(cfg, "threads", "2");
    CHECK(cfg.threads == 2);

    CHECK_THROWS_AS(iasim::apply_key(cfg, "bandwidth", "1"), iasim::config_error);
    CHECK_THROWS_AS(iasim::apply_key(cfg, "K", "four"), iasim::config_error);
    CHECK_THROWS_AS(iasim::apply_key(cfg, "master_seed", "-3"), iasim::config_error);
    CHECK_THROWS_AS(iasim::apply_key(cfg, "perfect_csi", "maybe"), iasim::config_error);
    CHECK_THROWS_AS(iasim::apply_key(cfg, "schemes", "IA,OFDM"), iasim::config_error);
}

TEST_CASE("config files round-trip through the serializer") {
    TempFile f("roundtrip.cfg");
    {
        std::ofstream out(f.path);
        out << "# dense grid example\n"
            << "topology = grid\n"
            << "rows = 2\n"
            << "cols = 2\n\n"
            << "tau_coh = 150   # longer coherence\n"
            << "p_t_dbm = 0:2:30\n"
            << "master_seed = 7\n";
    }
    const auto cfg = iasim::parse_config_file(f.path);
    CHECK(cfg.tau_coh == 150);
    CHECK(cfg.master_seed == 7);
    REQUIRE(cfg.p_t_dbm.size() == 16);

    // serialize -> parse -> serialize is a fixed point.
    TempFile g("roundtrip2.cfg");
    {
        std::ofstream out(g.path);
        out << iasim::serialize_config(cfg);
    }
    const auto cfg2 = iasim::parse_config_file(g.path);
    CHECK(iasim::serialize_config(cfg2) == iasim::serialize_config(cfg));

    CHECK_THROWS_AS(iasim::parse_config_file("/nonexistent/nowhere.cfg"),
                    iasim::config_error);
    TempFile bad("bad.cfg");
    {
        std::ofstream out(bad.path);
        out << "this line has no equals sign\n";
    }
    CHECK_THROWS_AS(iasim::parse_config_file(bad.path), iasim::config_error);
}

TEST_CASE("validate_config rejects inconsistent settings") {
    auto base = iasim::default_config();

    auto c = base;
    c.K = 1;
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.d = 3; // 2N = 10 < d(K+1) = 15
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.topology.rows = 3; // 3*2 != K=4
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.topology.kind = iasim::TopologyKind::Random;
    c.topology.n_tx = 3; // fewer candidates than receivers
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.p_t_dbm.clear();
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.p_t_dbm = {0.0, 10.0, 10.0};
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.schemes = {iasim::Scheme::IA, iasim::Scheme::IA};
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.schemes = {iasim::Scheme::TDMA};
    c.validation = true; // validation needs IA in the scheme set
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);

    c = base;
    c.realizations = 0;
    CHECK_THROWS_AS(iasim::validate_config(c), iasim::config_error);
}

TEST_CASE("make_placement dispatches on the topology kind") {
    auto cfg = iasim::default_config();
    const auto grid = iasim::make_placement(cfg, 3);
    CHECK(grid.tx_positions.size() == 4);

    cfg.topology.kind = iasim::TopologyKind::Line;
    const auto line = iasim::make_placement(cfg, 3);
    CHECK(line.tx_positions.size() == 4);
    CHECK(line.tx_positions[3][1] == line.tx_positions[0][1]); // one row

    cfg.topology.kind = iasim::TopologyKind::Random;
    cfg.topology.n_tx = 12;
    cfg.topology.side = 0.0; // auto: cell_side * sqrt(K) = 10
    const auto rnd = iasim::make_placement(cfg, 3);
    CHECK(rnd.tx_positions.size() == 12);
    for (const auto& p : rnd.tx_positions) {
        CHECK(p[0] <= 10.0);
        CHECK(p[1] <= 10.0);
    }
}

TEST_CASE("run_sweep matches a by-hand evaluation of the seeding contract") {
    auto cfg = small_line_config();
    cfg.schemes = {iasim::Scheme::IA};
    cfg.master_seed = 11;
    cfg.realizations = 3;

    const auto result = iasim::run_sweep(cfg);
    REQUIRE(result.rows.size() == 1);
    const auto& row = result.rows[0];
    CHECK(row.realizations == 3);
    CHECK(row.scheme == iasim::Scheme::IA);

    const double p_t = iasim::dbm_to_mw(10.0);
    const double p_n = iasim::dbm_to_mw(cfg.p_noise_dbm);
    iasim::SchemeConfig sc;
    sc.scheme = iasim::Scheme::IA;
    sc.K = 3;
    sc.Nr = 2;
    sc.Nt = 2;
    sc.d = 1;
    sc.tau_coh = cfg.tau_coh;
    double acc = 0.0;
    for (int r = 0; r < 3; ++r) {
        const std::uint64_t sub =
            iasim::derive_seed(11, cfg.realization_offset + static_cast<std::uint64_t>(r));
        const auto pl = iasim::make_placement(cfg, iasim::derive_seed(sub, 0));
        const auto gains = iasim::link_gains(pl, iasim::PathLossModel{30.0, cfg.gamma});
        const auto err = iasim::csi_error_minimum_training(gains, p_t, p_n, 2, 1);
        acc += iasim::ia_sum_rate(gains, err, p_t, p_n, sc).total;
    }
    CHECK(row.mean_sum_rate == doctest::Approx(acc / 3.0).epsilon(1e-13));
}

TEST_CASE("split sweeps compose through realization_offset") {
    auto cfg = small_line_config();
    cfg.realizations = 8;
    const double full = iasim::run_sweep(cfg).rows[0].mean_sum_rate;

    auto lo = cfg;
    lo.realizations = 4;
    auto hi = cfg;
    hi.realizations = 4;
    hi.realization_offset = 4;
    const double split = 0.5 * (iasim::run_sweep(lo).rows[0].mean_sum_rate +
                                iasim::run_sweep(hi).rows[0].mean_sum_rate);
    CHECK(full == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("sweeps are monotone in the coherence interval") {
    auto cfg = small_line_config();
    double prev = 0.0;
    for (int tau : {30, 60, 120}) {
        cfg.tau_coh = tau;
        const auto res = iasim::run_sweep(cfg);
        double total = 0.0;
        for (const auto& r : res.rows) total += r.mean_sum_rate;
        CHECK(total > prev);
        prev = total;
    }
}

TEST_CASE("run_sweep output is ordered and thread-invariant") {
    auto cfg = iasim::default_config();
    cfg.p_t_dbm = {10.0, 0.0};
    cfg.realizations = 5;
    cfg.threads = 1;
    const auto serial = iasim::run_sweep(cfg);
    REQUIRE(serial.rows.size() == 6);
    // Power ascending, scheme name ascending within each power.
    CHECK(serial.rows[0].p_t_dbm == 0.0);
    CHECK(serial.rows[0].scheme == iasim::Scheme::IA);
    CHECK(serial.rows[1].scheme == iasim::Scheme::SU_MIMO);
    CHECK(serial.rows[2].scheme == iasim::Scheme::TDMA);
    CHECK(serial.rows[3].p_t_dbm == 10.0);

    cfg.threads = 3;
    const auto parallel = iasim::run_sweep(cfg);
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        CHECK(serial.rows[i].mean_sum_rate == parallel.rows[i].mean_sum_rate);
        CHECK(serial.rows[i].std_err == parallel.rows[i].std_err);
    }
}

TEST_CASE("write_csv emits the sweep contract") {
    auto cfg = small_line_config();
    cfg.p_t_dbm = {0.0, 10.0};
    cfg.schemes = {iasim::Scheme::IA, iasim::Scheme::TDMA};
    const auto result = iasim::run_sweep(cfg);

    TempFile f("sweep.csv");
    iasim::write_csv(result, f.path);
    const std::string text = slurp(f.path);
    std::istringstream lines(text);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "p_t_dbm,scheme,mean_sum_rate_bits,std_err,realizations");
    int rows = 0;
    std::string first_data;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        if (rows == 0) first_data = line;
        ++rows;
    }
    CHECK(rows == 4);
    CHECK(first_data.substr(0, 5) == "0,IA,");

    // Byte-identical on a second run (determinism end to end).
    TempFile g("sweep2.csv");
    iasim::write_csv(iasim::run_sweep(cfg), g.path);
    CHECK(slurp(g.path) == text);

    // The .meta sibling carries the canonical config echo.
    const std::string meta = slurp(f.path + ".meta");
    CHECK(meta == result.config_echo);
    CHECK(meta.find("master_seed = 1") != std::string::npos);
    CHECK(meta.find("topology = line") != std::string::npos);
}

TEST_CASE("export_topology emits tx rows then rx rows") {
    auto cfg = iasim::default_config();
    cfg.topology.kind = iasim::TopologyKind::Random;
    cfg.topology.n_tx = 6;
    const auto pl = iasim::make_placement(cfg, 9);

    TempFile f("topo.csv");
    iasim::export_topology(pl, f.path);
    std::istringstream lines(slurp(f.path));
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "node_type,index,x_m,y_m,associated_tx");
    int tx_rows = 0, rx_rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("tx,", 0) == 0) {
            ++tx_rows;
            CHECK(line.back() == ','); // no association on tx rows
        } else if (line.rfind("rx,", 0) == 0) {
            ++rx_rows;
            CHECK(line.back() != ',');
        }
    }
    CHECK(tx_rows == 6);
    CHECK(rx_rows == 4);
}

TEST_CASE("run_validation tracks the closed form with perfect CSI") {
    auto cfg = small_line_config();
    cfg.validation = true;
    cfg.perfect_csi = true;
    cfg.validation_blocks = 120;
    cfg.schemes = {iasim::Scheme::IA};
    cfg.p_t_dbm = {10.0};

    const auto res = iasim::run_validation(cfg);
    REQUIRE(res.rows.size() == 1);
    const auto& row = res.rows[0];
    CHECK(row.blocks == 120);
    CHECK(row.analytic > 0.0);
    CHECK(row.simulated > 0.0);
    CHECK(row.std_err > 0.0);
    CHECK(row.rel_gap ==
          doctest::Approx((row.simulated - row.analytic) / row.analytic).epsilon(1e-12));
    // (3,2,1) aligns exactly: the Monte Carlo mean lands near the closed form.
    CHECK(std::abs(row.rel_gap) < 0.05);
    CHECK(row.nonconverged == 0);

    // Determinism of the whole validation path.
    const auto res2 = iasim::run_validation(cfg);
    CHECK(res2.rows[0].simulated == row.simulated);
    CHECK(res2.rows[0].std_err == row.std_err);
}

TEST_CASE("run_validation reports trained-CSI gaps per power") {
    auto cfg = small_line_config();
    cfg.validation = true;
    cfg.perfect_csi = false;
    cfg.validation_blocks = 30;
    cfg.schemes = {iasim::Scheme::IA};
    cfg.p_t_dbm = {0.0, 20.0};

    const auto res = iasim::run_validation(cfg);
    REQUIRE(res.rows.size() == 2);
    CHECK(res.rows[0].p_t_dbm == 0.0);
    CHECK(res.rows[1].p_t_dbm == 20.0);
    for (const auto& row : res.rows) {
        CHECK(row.blocks == 30);
        CHECK(row.analytic > 0.0);
        CHECK(row.simulated > 0.0);
        CHECK(std::isfinite(row.rel_gap));
    }

    // The validation driver refuses to run without the validation flag.
    auto off = cfg;
    off.validation = false;
    CHECK_THROWS_AS(iasim::run_validation(off), iasim::config_error);
}

TEST_CASE("validation CSV carries the documented columns") {
    auto cfg = small_line_config();
    cfg.validation = true;
    cfg.perfect_csi = true;
    cfg.validation_blocks = 10;
    cfg.schemes = {iasim::Scheme::IA};

    const auto res = iasim::run_validation(cfg);
    TempFile f("val.csv");
    iasim::write_csv(res, f.path);
    std::istringstream lines(slurp(f.path));
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line ==
          "p_t_dbm,analytic_sum_rate_bits,simulated_mean_bits,std_err,rel_gap,"
          "nonconverged,blocks");
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1);
}
