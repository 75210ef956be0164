// SPDX-License-Identifier: MIT

#include "iasim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "iasim/alignment.hpp"
#include "iasim/rng.hpp"

namespace iasim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
        out.push_back(trim(item));
    return out;
}

std::string fmt_g(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw config_error("bad value for '" + key + "': '" + value + "'");
    }
}

long long parse_ll(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw config_error("bad value for '" + key + "': '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    return static_cast<int>(parse_ll(key, value));
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size() || value.find('-') != std::string::npos)
            throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw config_error("bad value for '" + key + "': '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw config_error("bad value for '" + key + "': '" + value + "'");
}

std::vector<double> parse_sweep(const std::string& key, const std::string& value) {
    std::vector<double> out;
    if (value.find(':') != std::string::npos) {
        const auto parts = split(value, ':');
        if (parts.size() != 3)
            throw config_error("bad value for '" + key + "': expected start:step:stop");
        const double start = parse_double(key, parts[0]);
        const double step = parse_double(key, parts[1]);
        const double stop = parse_double(key, parts[2]);
        if (step == 0.0)
            throw config_error("bad value for '" + key + "': zero step");
        const double eps = 1.0e-9 * std::max({1.0, std::abs(start), std::abs(stop)});
        for (double v = start; (step > 0.0) ? (v <= stop + eps) : (v >= stop - eps);
             v += step) {
            out.push_back(v);
            if (out.size() > 100000)
                throw config_error("bad value for '" + key + "': sweep too long");
        }
    } else {
        for (const auto& item : split(value, ','))
            out.push_back(parse_double(key, item));
    }
    return out;
}

std::vector<Scheme> parse_schemes(const std::string& key, const std::string& value) {
    std::vector<Scheme> out;
    for (const auto& item : split(value, ',')) {
        try {
            out.push_back(scheme_from_name(item));
        } catch (const std::invalid_argument&) {
            throw config_error("bad value for '" + key + "': unknown scheme '" + item +
                               "'");
        }
    }
    return out;
}

const char* topology_name(TopologyKind kind) {
    switch (kind) {
    case TopologyKind::Line:
        return "line";
    case TopologyKind::Grid:
        return "grid";
    case TopologyKind::Random:
        return "random";
    }
    return "?";
}

TopologyKind topology_from_name(const std::string& value) {
    if (value == "line")
        return TopologyKind::Line;
    if (value == "grid")
        return TopologyKind::Grid;
    if (value == "random")
        return TopologyKind::Random;
    throw config_error("bad value for 'topology': '" + value + "'");
}

bool has_scheme(const SimConfig& cfg, Scheme s) {
    return std::find(cfg.schemes.begin(), cfg.schemes.end(), s) != cfg.schemes.end();
}

// Runs fn(0..n-1) on up to `threads` workers with strided indices; results
// must land in per-index slots so reduction order stays deterministic.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    int t = (threads > 0) ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1)
        t = 1;
    t = std::min(t, n);
    if (t <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += t)
                    fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

struct MeanStdErr {
    double mean = 0.0;
    double std_err = 0.0;
};

MeanStdErr reduce_mean(const std::vector<double>& values) {
    const auto n = values.size();
    double sum = 0.0;
    for (const double v : values)
        sum += v;
    const double mean = sum / static_cast<double>(n);
    if (n < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (const double v : values)
        ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

void write_meta(const std::string& path, const std::string& config_echo) {
    const std::string meta_path = path + ".meta";
    std::ofstream out(meta_path);
    if (!out)
        throw std::runtime_error("write_csv: cannot open '" + meta_path + "'");
    out << config_echo;
    out.flush();
    if (!out.good())
        throw std::runtime_error("write_csv: write failed for '" + meta_path + "'");
}

} // namespace

SimConfig default_config() {
    SimConfig cfg;
    for (double v = 0.0; v <= 30.0 + 1.0e-9; v += 2.0)
        cfg.p_t_dbm.push_back(v);
    cfg.schemes = {Scheme::IA, Scheme::TDMA, Scheme::SU_MIMO};
    return cfg;
}

void apply_key(SimConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "topology")
        cfg.topology.kind = topology_from_name(value);
    else if (key == "rows")
        cfg.topology.rows = parse_int(key, value);
    else if (key == "cols")
        cfg.topology.cols = parse_int(key, value);
    else if (key == "n_tx")
        cfg.topology.n_tx = parse_int(key, value);
    else if (key == "cell_side")
        cfg.topology.cell_side = parse_double(key, value);
    else if (key == "side")
        cfg.topology.side = parse_double(key, value);
    else if (key == "K")
        cfg.K = parse_int(key, value);
    else if (key == "N")
        cfg.N = parse_int(key, value);
    else if (key == "d")
        cfg.d = parse_int(key, value);
    else if (key == "gamma")
        cfg.gamma = parse_double(key, value);
    else if (key == "tau_coh")
        cfg.tau_coh = parse_int(key, value);
    else if (key == "p_noise_dbm")
        cfg.p_noise_dbm = parse_double(key, value);
    else if (key == "p_t_dbm")
        cfg.p_t_dbm = parse_sweep(key, value);
    else if (key == "realizations")
        cfg.realizations = parse_int(key, value);
    else if (key == "realization_offset")
        cfg.realization_offset = parse_u64(key, value);
    else if (key == "schemes")
        cfg.schemes = parse_schemes(key, value);
    else if (key == "master_seed")
        cfg.master_seed = parse_u64(key, value);
    else if (key == "validation")
        cfg.validation = parse_bool(key, value);
    else if (key == "validation_blocks")
        cfg.validation_blocks = parse_int(key, value);
    else if (key == "perfect_csi")
        cfg.perfect_csi = parse_bool(key, value);
    else if (key == "threads")
        cfg.threads = parse_int(key, value);
    else
        throw config_error("unknown config key '" + key + "'");
}

SimConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    SimConfig cfg = default_config();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("bad line " + std::to_string(lineno) + " in '" + path +
                               "': expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("bad line " + std::to_string(lineno) + " in '" + path +
                               "': empty key");
        apply_key(cfg, key, value);
    }
    return cfg;
}

std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream out;
    out << "topology = " << topology_name(cfg.topology.kind) << '\n';
    out << "rows = " << cfg.topology.rows << '\n';
    out << "cols = " << cfg.topology.cols << '\n';
    out << "n_tx = " << cfg.topology.n_tx << '\n';
    out << "cell_side = " << fmt_g(cfg.topology.cell_side) << '\n';
    out << "side = " << fmt_g(cfg.topology.side) << '\n';
    out << "K = " << cfg.K << '\n';
    out << "N = " << cfg.N << '\n';
    out << "d = " << cfg.d << '\n';
    out << "gamma = " << fmt_g(cfg.gamma) << '\n';
    out << "tau_coh = " << cfg.tau_coh << '\n';
    out << "p_noise_dbm = " << fmt_g(cfg.p_noise_dbm) << '\n';
    out << "p_t_dbm = ";
    for (std::size_t i = 0; i < cfg.p_t_dbm.size(); ++i)
        out << (i ? "," : "") << fmt_g(cfg.p_t_dbm[i]);
    out << '\n';
    out << "realizations = " << cfg.realizations << '\n';
    out << "realization_offset = " << cfg.realization_offset << '\n';
    out << "schemes = ";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
        out << (i ? "," : "") << scheme_name(cfg.schemes[i]);
    out << '\n';
    out << "master_seed = " << cfg.master_seed << '\n';
    out << "validation = " << (cfg.validation ? "true" : "false") << '\n';
    out << "validation_blocks = " << cfg.validation_blocks << '\n';
    out << "perfect_csi = " << (cfg.perfect_csi ? "true" : "false") << '\n';
    out << "threads = " << cfg.threads << '\n';
    return out.str();
}

void validate_config(const SimConfig& cfg) {
    if (cfg.K < 2)
        throw config_error("K must be >= 2");
    if (cfg.N < 1 || cfg.d < 1 || cfg.d > cfg.N)
        throw config_error("need 1 <= d <= N");
    if (!(cfg.gamma > 0.0))
        throw config_error("gamma must be > 0");
    if (cfg.tau_coh < 1)
        throw config_error("tau_coh must be >= 1");
    if (cfg.realizations < 1)
        throw config_error("realizations must be >= 1");
    if (cfg.validation_blocks < 1)
        throw config_error("validation_blocks must be >= 1");
    if (cfg.threads < 0)
        throw config_error("threads must be >= 0");
    if (!(cfg.topology.cell_side > 0.0))
        throw config_error("cell_side must be > 0");
    if (cfg.topology.side < 0.0)
        throw config_error("side must be >= 0");
    if (cfg.topology.kind == TopologyKind::Grid &&
        (cfg.topology.rows < 1 || cfg.topology.cols < 1 ||
         cfg.topology.rows * cfg.topology.cols != cfg.K))
        throw config_error("grid topology needs rows*cols == K");
    if (cfg.topology.kind == TopologyKind::Random && cfg.topology.n_tx < cfg.K)
        throw config_error("random topology needs n_tx >= K");
    if (cfg.p_t_dbm.empty())
        throw config_error("p_t_dbm sweep must be non-empty");
    {
        std::vector<double> sorted = cfg.p_t_dbm;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw config_error("p_t_dbm sweep has duplicate entries");
    }
    if (cfg.schemes.empty())
        throw config_error("schemes must be non-empty");
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.schemes.size(); ++j)
            if (cfg.schemes[i] == cfg.schemes[j])
                throw config_error("schemes list has duplicates");
    if (has_scheme(cfg, Scheme::IA) && !feasible(cfg.K, cfg.N, cfg.d))
        throw config_error("infeasible (K, N, d) for IA: need 2N >= d(K+1)");
    if (cfg.validation && !has_scheme(cfg, Scheme::IA))
        throw config_error("validation requires IA in schemes");
}

NodePlacement make_placement(const SimConfig& cfg, std::uint64_t rng_seed) {
    switch (cfg.topology.kind) {
    case TopologyKind::Line:
        return place_line(cfg.K, cfg.topology.cell_side, rng_seed);
    case TopologyKind::Grid:
        return place_grid(cfg.topology.rows, cfg.topology.cols, cfg.topology.cell_side,
                          rng_seed);
    case TopologyKind::Random: {
        const double side = (cfg.topology.side > 0.0)
                                ? cfg.topology.side
                                : cfg.topology.cell_side * std::sqrt(static_cast<double>(cfg.K));
        return place_random(cfg.topology.n_tx, cfg.K, side, rng_seed);
    }
    }
    throw config_error("unknown topology kind");
}

SweepResult run_sweep(const SimConfig& cfg) {
    validate_config(cfg);
    const int n_real = cfg.realizations;
    const int n_pow = static_cast<int>(cfg.p_t_dbm.size());
    const int n_sch = static_cast<int>(cfg.schemes.size());
    const double p_noise = dbm_to_mw(cfg.p_noise_dbm);
    const PathLossModel model{30.0, cfg.gamma};

    std::vector<std::vector<double>> totals(
        static_cast<std::size_t>(n_real),
        std::vector<double>(static_cast<std::size_t>(n_pow * n_sch), 0.0));

    parallel_for(n_real, cfg.threads, [&](int r) {
        const std::uint64_t sub =
            derive_seed(cfg.master_seed, cfg.realization_offset + static_cast<std::uint64_t>(r));
        const NodePlacement placement = make_placement(cfg, derive_seed(sub, 0));
        const LinkGainMatrix gains = link_gains(placement, model);
        auto& slot = totals[static_cast<std::size_t>(r)];
        for (int p = 0; p < n_pow; ++p) {
            const double p_t = dbm_to_mw(cfg.p_t_dbm[static_cast<std::size_t>(p)]);
            const CsiErrorModel err =
                cfg.perfect_csi ? csi_error_perfect(cfg.K)
                                : csi_error_minimum_training(gains, p_t, p_noise, cfg.N,
                                                             cfg.d);
            for (int s = 0; s < n_sch; ++s) {
                SchemeConfig sc;
                sc.scheme = cfg.schemes[static_cast<std::size_t>(s)];
                sc.K = cfg.K;
                sc.Nr = cfg.N;
                sc.Nt = cfg.N;
                sc.d = cfg.d;
                sc.tau_coh = cfg.tau_coh;
                slot[static_cast<std::size_t>(p * n_sch + s)] =
                    sum_rate(gains, err, p_t, p_noise, sc).total;
            }
        }
    });

    SweepResult result;
    result.master_seed = cfg.master_seed;
    result.config_echo = serialize_config(cfg);
    std::vector<double> column(static_cast<std::size_t>(n_real));
    for (int p = 0; p < n_pow; ++p) {
        for (int s = 0; s < n_sch; ++s) {
            for (int r = 0; r < n_real; ++r)
                column[static_cast<std::size_t>(r)] =
                    totals[static_cast<std::size_t>(r)][static_cast<std::size_t>(p * n_sch + s)];
            const MeanStdErr m = reduce_mean(column);
            SweepRow row;
            row.p_t_dbm = cfg.p_t_dbm[static_cast<std::size_t>(p)];
            row.scheme = cfg.schemes[static_cast<std::size_t>(s)];
            row.mean_sum_rate = m.mean;
            row.std_err = m.std_err;
            row.realizations = n_real;
            result.rows.push_back(row);
        }
    }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const SweepRow& a, const SweepRow& b) {
                         if (a.p_t_dbm != b.p_t_dbm)
                             return a.p_t_dbm < b.p_t_dbm;
                         return std::string(scheme_name(a.scheme)) <
                                std::string(scheme_name(b.scheme));
                     });
    return result;
}

ValidationResult run_validation(const SimConfig& cfg) {
    validate_config(cfg);
    if (!cfg.validation)
        throw config_error("run_validation requires the validation flag");

    const int n_blocks = cfg.validation_blocks;
    const int n_pow = static_cast<int>(cfg.p_t_dbm.size());
    const double p_noise = dbm_to_mw(cfg.p_noise_dbm);
    const PathLossModel model{30.0, cfg.gamma};
    const double training = static_cast<double>(cfg.K) * (cfg.N + cfg.d);
    const double factor =
        std::max(0.0, (static_cast<double>(cfg.tau_coh) - training) / cfg.tau_coh);

    const NodePlacement placement = make_placement(cfg, derive_seed(cfg.master_seed, 0));
    const LinkGainMatrix gains = link_gains(placement, model);

    SchemeConfig sc;
    sc.scheme = Scheme::IA;
    sc.K = cfg.K;
    sc.Nr = cfg.N;
    sc.Nt = cfg.N;
    sc.d = cfg.d;
    sc.tau_coh = cfg.tau_coh;

    const SolverOptions opt; // defaults

    std::vector<std::vector<double>> block_vals(
        static_cast<std::size_t>(n_blocks),
        std::vector<double>(static_cast<std::size_t>(n_pow), 0.0));
    std::vector<std::vector<int>> block_nonconv(
        static_cast<std::size_t>(n_blocks),
        std::vector<int>(static_cast<std::size_t>(n_pow), 0));

    parallel_for(n_blocks, cfg.threads, [&](int b) {
        const std::uint64_t bs = derive_seed(
            cfg.master_seed, 1 + cfg.realization_offset + static_cast<std::uint64_t>(b));
        const ChannelSet ch = draw_channels(cfg.K, cfg.N, cfg.N, derive_seed(bs, 0));
        auto& vals = block_vals[static_cast<std::size_t>(b)];
        auto& ncs = block_nonconv[static_cast<std::size_t>(b)];

        if (cfg.perfect_csi) {
            // the minimum-leakage iteration is invariant to a common power
            // scale, so one solve on the gain weights serves every sweep point
            const AlignmentSolution sol =
                min_leakage_solve(ch.mats, gains, cfg.d, opt, derive_seed(bs, 1));
            const int nc = sol.converged ? 0 : 1;
            for (int p = 0; p < n_pow; ++p) {
                const double p_t = dbm_to_mw(cfg.p_t_dbm[static_cast<std::size_t>(p)]);
                const arma::mat powers = p_t * gains;
                const arma::vec rates = instantaneous_rates(
                    ch.mats, powers, sol.precoders, sol.combiners, p_noise);
                vals[static_cast<std::size_t>(p)] = factor * arma::accu(rates);
                ncs[static_cast<std::size_t>(p)] = nc;
            }
            return;
        }

        for (int p = 0; p < n_pow; ++p) {
            const double p_t = dbm_to_mw(cfg.p_t_dbm[static_cast<std::size_t>(p)]);
            const arma::mat powers = p_t * gains;
            const CsiErrorModel err =
                csi_error_minimum_training(gains, p_t, p_noise, cfg.N, cfg.d);
            const auto pu = static_cast<std::uint64_t>(p);

            // reverse training: transmitters work from noisy estimates
            const EstimatedChannelSet rev =
                split_estimate(ch, err, derive_seed(bs, 3 * pu + 1));
            const AlignmentSolution sol = min_leakage_solve(
                rev.estimates, powers, cfg.d, opt, derive_seed(bs, 3 * pu + 3));

            // forward training: receivers estimate the precoded links
            std::vector<arma::cx_mat> precoded(static_cast<std::size_t>(cfg.K) * cfg.K);
            for (int k = 0; k < cfg.K; ++k)
                for (int i = 0; i < cfg.K; ++i)
                    precoded[static_cast<std::size_t>(k * cfg.K + i)] =
                        ch.at(k, i) * sol.precoders[static_cast<std::size_t>(i)];
            const EstimatedChannelSet fwd =
                split_estimate(precoded, cfg.K, err, derive_seed(bs, 3 * pu + 2));

            std::vector<arma::cx_mat> combiners(static_cast<std::size_t>(cfg.K));
            std::vector<arma::cx_mat> row(static_cast<std::size_t>(cfg.K));
            for (int k = 0; k < cfg.K; ++k) {
                for (int i = 0; i < cfg.K; ++i)
                    row[static_cast<std::size_t>(i)] = fwd.estimate(k, i);
                const arma::vec weights = powers.row(static_cast<arma::uword>(k)).t();
                combiners[static_cast<std::size_t>(k)] =
                    min_leakage_combiner(row, weights, k, cfg.d);
            }

            const arma::vec rates =
                instantaneous_rates(ch.mats, powers, sol.precoders, combiners, p_noise);
            vals[static_cast<std::size_t>(p)] = factor * arma::accu(rates);
            ncs[static_cast<std::size_t>(p)] = sol.converged ? 0 : 1;
        }
    });

    ValidationResult result;
    result.master_seed = cfg.master_seed;
    result.config_echo = serialize_config(cfg);
    std::vector<double> column(static_cast<std::size_t>(n_blocks));
    for (int p = 0; p < n_pow; ++p) {
        const double p_t = dbm_to_mw(cfg.p_t_dbm[static_cast<std::size_t>(p)]);
        const CsiErrorModel err =
            cfg.perfect_csi ? csi_error_perfect(cfg.K)
                            : csi_error_minimum_training(gains, p_t, p_noise, cfg.N,
                                                         cfg.d);
        ValidationRow row;
        row.p_t_dbm = cfg.p_t_dbm[static_cast<std::size_t>(p)];
        row.analytic = ia_sum_rate(gains, err, p_t, p_noise, sc).total;
        int nonconv = 0;
        for (int b = 0; b < n_blocks; ++b) {
            column[static_cast<std::size_t>(b)] =
                block_vals[static_cast<std::size_t>(b)][static_cast<std::size_t>(p)];
            nonconv += block_nonconv[static_cast<std::size_t>(b)][static_cast<std::size_t>(p)];
        }
        const MeanStdErr m = reduce_mean(column);
        row.simulated = m.mean;
        row.std_err = m.std_err;
        row.rel_gap = (row.analytic != 0.0) ? (row.simulated - row.analytic) / row.analytic
                                            : 0.0;
        row.nonconverged = nonconv;
        row.blocks = n_blocks;
        result.rows.push_back(row);
    }
    std::stable_sort(result.rows.begin(), result.rows.end(),
                     [](const ValidationRow& a, const ValidationRow& b) {
                         return a.p_t_dbm < b.p_t_dbm;
                     });
    return result;
}

void write_csv(const SweepResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_csv: cannot open '" + path + "'");
    out << "p_t_dbm,scheme,mean_sum_rate_bits,std_err,realizations\n";
    for (const auto& row : result.rows) {
        out << fmt_g(row.p_t_dbm, "%.9g") << ',' << scheme_name(row.scheme) << ','
            << fmt_g(row.mean_sum_rate, "%.9g") << ',' << fmt_g(row.std_err, "%.9g")
            << ',' << row.realizations << '\n';
    }
    out.flush();
    if (!out.good())
        throw std::runtime_error("write_csv: write failed for '" + path + "'");
    write_meta(path, result.config_echo);
}

void write_csv(const ValidationResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("write_csv: cannot open '" + path + "'");
    out << "p_t_dbm,analytic_sum_rate_bits,simulated_mean_bits,std_err,rel_gap,"
           "nonconverged,blocks\n";
    for (const auto& row : result.rows) {
        out << fmt_g(row.p_t_dbm, "%.9g") << ',' << fmt_g(row.analytic, "%.9g") << ','
            << fmt_g(row.simulated, "%.9g") << ',' << fmt_g(row.std_err, "%.9g") << ','
            << fmt_g(row.rel_gap, "%.9g") << ',' << row.nonconverged << ',' << row.blocks
            << '\n';
    }
    out.flush();
    if (!out.good())
        throw std::runtime_error("write_csv: write failed for '" + path + "'");
    write_meta(path, result.config_echo);
}

void export_topology(const NodePlacement& placement, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("export_topology: cannot open '" + path + "'");
    out << "node_type,index,x_m,y_m,associated_tx\n";
    for (std::size_t i = 0; i < placement.tx_positions.size(); ++i) {
        out << "tx," << i << ',' << fmt_g(placement.tx_positions[i][0], "%.9g") << ','
            << fmt_g(placement.tx_positions[i][1], "%.9g") << ",\n";
    }
    for (std::size_t i = 0; i < placement.rx_positions.size(); ++i) {
        out << "rx," << i << ',' << fmt_g(placement.rx_positions[i][0], "%.9g") << ','
            << fmt_g(placement.rx_positions[i][1], "%.9g") << ','
            << placement.association[i] << '\n';
    }
    out.flush();
    if (!out.good())
        throw std::runtime_error("export_topology: write failed for '" + path + "'");
}

} // namespace iasim
