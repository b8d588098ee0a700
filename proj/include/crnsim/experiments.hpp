#pragma once

// Experiment front end: plain-text scenario configs, compiled-in presets for
// the standard figures, CSV emission, the per-invocation run manifest, and
// the CLI entry point.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "crnsim/throughput.hpp"
#include "crnsim/version.hpp"

namespace crnsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

inline double parse_double(const std::string& value, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + key +
                          "' is not a number: '" + value + "'");
    }
}

inline long parse_long(const std::string& value, int line, const std::string& key) {
    long v = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + key +
                          "' is not an integer: '" + value + "'");
    }
    return v;
}

inline std::uint64_t parse_u64(const std::string& value, int line, const std::string& key) {
    std::uint64_t v = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + key +
                          "' is not an unsigned integer: '" + value + "'");
    }
    return v;
}

inline ReconfigLevel parse_level(const std::string& value, int line) {
    if (value == "basic") return ReconfigLevel::basic;
    if (value == "device_mjd") return ReconfigLevel::device_mjd;
    if (value == "device_rmd") return ReconfigLevel::device_rmd;
    if (value == "net_centralized") return ReconfigLevel::net_centralized;
    if (value == "net_distributed") return ReconfigLevel::net_distributed;
    throw ConfigError("line " + std::to_string(line) + ": unknown level '" + value + "'");
}

inline ConstraintMode parse_constraint(const std::string& value, int line) {
    if (value == "protection") return ConstraintMode::protection;
    if (value == "target_fa") return ConstraintMode::target_fa;
    throw ConfigError("line " + std::to_string(line) + ": unknown constraint '" + value +
                      "'");
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace detail

/// Parse a scenario config from `key = value` text. Blank lines and lines
/// starting with '#' are ignored; '#' also starts a trailing comment.
/// Unknown or repeated keys are rejected, as is a document with no keys at
/// all. Missing keys keep their defaults. The parsed config is validated.
inline ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig config;
    std::map<std::string, bool> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    int keys = 0;

    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        const std::string entry = detail::trim(raw);
        if (entry.empty()) {
            continue;
        }
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(entry.substr(0, eq));
        const std::string value = detail::trim(entry.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": empty key or value");
        }
        if (seen[key]) {
            throw ConfigError("line " + std::to_string(line) + ": repeated key '" + key +
                              "'");
        }
        seen[key] = true;
        ++keys;

        if (key == "level") {
            config.level = detail::parse_level(value, line);
        } else if (key == "constraint") {
            config.constraint = detail::parse_constraint(value, line);
        } else if (key == "k_count") {
            config.k_count = static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "m_count") {
            config.m_count = static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "i_per_su") {
            config.i_per_su = static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "sample_budget") {
            config.sample_budget = static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "window_cap") {
            config.window_cap = static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "target_fa") {
            config.target_fa = detail::parse_double(value, line, key);
        } else if (key == "protection_level") {
            config.protection_level = detail::parse_double(value, line, key);
        } else if (key == "mean_snr_db") {
            config.mean_snr_db = detail::parse_double(value, line, key);
        } else if (key == "su_tx_snr_db") {
            config.su_tx_snr_db = detail::parse_double(value, line, key);
        } else if (key == "pilot_theta") {
            config.pilot_theta = detail::parse_double(value, line, key);
        } else if (key == "consensus_iterations") {
            config.consensus.iterations =
                static_cast<int>(detail::parse_long(value, line, key));
        } else if (key == "consensus_step") {
            config.consensus.step = detail::parse_double(value, line, key);
        } else if (key == "trials") {
            config.trials = detail::parse_long(value, line, key);
        } else if (key == "master_seed") {
            config.master_seed = detail::parse_u64(value, line, key);
        } else if (key == "threads") {
            config.threads = static_cast<int>(detail::parse_long(value, line, key));
        } else {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                              "'");
        }
    }
    if (keys == 0) {
        throw ConfigError("config document contains no keys");
    }
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("validation: ") + e.what());
    }
    return config;
}

inline ScenarioConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
inline std::string serialize_config(const ScenarioConfig& config) {
    std::ostringstream out;
    out << "level = " << to_string(config.level) << '\n'
        << "constraint = " << to_string(config.constraint) << '\n'
        << "k_count = " << config.k_count << '\n'
        << "m_count = " << config.m_count << '\n'
        << "i_per_su = " << config.i_per_su << '\n'
        << "sample_budget = " << config.sample_budget << '\n'
        << "window_cap = " << config.window_cap << '\n'
        << "target_fa = " << detail::format_double(config.target_fa) << '\n'
        << "protection_level = " << detail::format_double(config.protection_level) << '\n'
        << "mean_snr_db = " << detail::format_double(config.mean_snr_db) << '\n'
        << "su_tx_snr_db = " << detail::format_double(config.su_tx_snr_db) << '\n'
        << "pilot_theta = " << detail::format_double(config.pilot_theta) << '\n'
        << "consensus_iterations = " << config.consensus.iterations << '\n'
        << "consensus_step = " << detail::format_double(config.consensus.step) << '\n'
        << "trials = " << config.trials << '\n'
        << "master_seed = " << config.master_seed << '\n'
        << "threads = " << config.threads << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// ROC curves
// ---------------------------------------------------------------------------

struct RocParams {
    int window = 1000;
    double p_fa = 0.1;
    double theta = 0.5;
    double snr_db_min = -25.0;
    double snr_db_max = 0.0;
    double snr_db_step = 1.0;
    long trials = 10000; // Monte-Carlo trials per empirical point
    std::uint64_t master_seed = 1;
    int threads = 1;
};

struct RocRow {
    double snr_db = 0.0;
    std::string detector;
    double pd_analytic = 0.0;
    double pd_empirical = 0.0; // NaN for analytic-only detectors
};

namespace detail {

inline double empirical_pd(DetectorKind kind, const RocParams& params, SnrValue snr,
                           std::uint64_t point_tag) {
    ChannelModel ch;
    ch.index = 0;
    ch.family = kind == DetectorKind::pilot ? SignalFamily::pilot : SignalFamily::unknown;
    ch.pilot_theta = params.theta;
    const double threshold = calibrate_threshold_fa(kind, params.window, params.p_fa);
    const auto pilot =
        kind == DetectorKind::pilot
            ? pilot_sequence(0, params.window)
            : std::vector<std::complex<double>>{};

    RandomStream stream(params.master_seed, point_tag);
    long detections = 0;
    for (long t = 0; t < params.trials; ++t) {
        const Observation obs =
            synthesize_observation(stream, ch, true, snr, params.window);
        const double stat = kind == DetectorKind::pilot ? pd_statistic(obs, pilot)
                                                        : ed_statistic(obs);
        detections += decide(stat, threshold) == Hypothesis::h1 ? 1 : 0;
    }
    return static_cast<double>(detections) / static_cast<double>(params.trials);
}

} // namespace detail

/// Detection-probability curves for the three sensors across an SNR grid at
/// a fixed false-alarm target. Energy and pilot rows carry a Monte-Carlo
/// check alongside the analytic value; the OFDM detector is analytic only.
inline std::vector<RocRow> compute_roc_curve(const RocParams& params) {
    if (params.window < 1 || params.trials < 1) {
        throw std::invalid_argument("compute_roc_curve: window and trials must be >= 1");
    }
    if (!(params.snr_db_step > 0.0) || params.snr_db_max < params.snr_db_min) {
        throw std::invalid_argument("compute_roc_curve: bad SNR grid");
    }
    std::vector<double> grid;
    for (double s = params.snr_db_min; s <= params.snr_db_max + 1e-9;
         s += params.snr_db_step) {
        grid.push_back(s);
    }

    std::vector<RocRow> rows(grid.size() * 3);
    const int threads =
        std::max(1, std::min<int>(params.threads, static_cast<int>(grid.size())));
    auto fill_point = [&](std::size_t g) {
        const SnrValue snr = SnrValue::from_db(grid[g]);
        const std::uint64_t tag = static_cast<std::uint64_t>(g);
        rows[3 * g + 0] = {grid[g], "ed", roc_ed(params.window, snr, params.p_fa),
                           detail::empirical_pd(DetectorKind::energy, params, snr,
                                                2 * tag)};
        rows[3 * g + 1] = {grid[g], "pd",
                           roc_pd(params.window, snr, params.theta, params.p_fa),
                           detail::empirical_pd(DetectorKind::pilot, params, snr,
                                                2 * tag + 1)};
        rows[3 * g + 2] = {grid[g], "ofdm", roc_ofdm(params.window, snr, params.p_fa),
                           std::numeric_limits<double>::quiet_NaN()};
    };
    if (threads == 1) {
        for (std::size_t g = 0; g < grid.size(); ++g) {
            fill_point(g);
        }
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t g = static_cast<std::size_t>(w); g < grid.size();
                     g += static_cast<std::size_t>(threads)) {
                    fill_point(g);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Consensus traces
// ---------------------------------------------------------------------------

/// One distributed sensing round with full per-iteration traces, for
/// inspecting how co-sensing SUs converge on each channel's statistic.
inline std::vector<ConsensusTraceRow> compute_consensus_trace(const ScenarioConfig& config) {
    config.validate();
    const Environment env = make_environment(config);
    RandomStream base(config.master_seed, 0);
    auto occupancy_stream = base.substream(detail::kTagOccupancy);
    auto snr_stream = base.substream(detail::kTagSnr);

    const SpectrumState state = draw_spectrum_state(occupancy_stream, env.channels);
    const SnrValue mean_snr = SnrValue::from_db(config.mean_snr_db);
    std::vector<std::vector<double>> snr(
        static_cast<std::size_t>(config.k_count),
        std::vector<double>(static_cast<std::size_t>(config.m_count)));
    for (auto& row : snr) {
        for (auto& v : row) {
            v = draw_rayleigh_snr(snr_stream, mean_snr).linear;
        }
    }

    const Allocation alloc = allocate_best_snr(snr, config.i_per_su);
    const double radius = min_clique_radius(env.positions, alloc.sus_of_channel);
    const NeighborGraph graph = build_geometric_graph(env.positions, radius);
    const int window = config.effective_window();

    std::vector<ConsensusTraceRow> trace;
    for (int m = 0; m < config.m_count; ++m) {
        const auto& ch = env.channels[static_cast<std::size_t>(m)];
        const auto& members = alloc.sus_of_channel[static_cast<std::size_t>(m)];
        if (members.size() < 2 || ch.family == SignalFamily::ofdm_cp) {
            continue; // nothing to exchange
        }
        const DetectorKind kind = kind_for_family(ch.family);
        std::vector<double> values;
        values.reserve(members.size());
        for (int k : members) {
            auto obs_stream = base.substream(
                detail::kTagObservation +
                static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(config.m_count) +
                static_cast<std::uint64_t>(m));
            const Observation obs = synthesize_observation(
                obs_stream, ch, state.occupied[static_cast<std::size_t>(m)],
                SnrValue(snr[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]),
                window);
            values.push_back(kind == DetectorKind::pilot
                                 ? pd_statistic(obs, pilot_sequence(m, window))
                                 : ed_statistic(obs));
        }
        ConsensusState cs = make_consensus_state(m, members, values,
                                                 config.consensus.step, graph);
        const double stable = max_stable_step(cs, graph);
        if (cs.step >= stable) {
            cs.step = 0.99 * stable;
        }
        const auto run = run_consensus(cs, graph, config.consensus.iterations);
        trace.insert(trace.end(), run.trace.begin(), run.trace.end());
    }
    return trace;
}

// ---------------------------------------------------------------------------
// CSV + manifest emission
// ---------------------------------------------------------------------------

inline void write_roc_csv(const std::filesystem::path& path,
                          const std::vector<RocRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "snr_db,detector,pd_analytic,pd_empirical\n";
    for (const auto& r : rows) {
        out << detail::format_double(r.snr_db) << ',' << r.detector << ','
            << detail::format_double(r.pd_analytic) << ','
            << detail::format_double(r.pd_empirical) << '\n';
    }
}

inline void write_sweep_csv(const std::filesystem::path& path,
                            const std::vector<ThroughputReport>& reports,
                            const std::vector<std::string>& labels) {
    if (labels.size() != reports.size()) {
        throw std::invalid_argument("write_sweep_csv: label count mismatch");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "axis_value,level,mean_throughput,ci95,global_pd_min,global_pfa_max,"
           "constraint_mode\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        double pd_min = nan;
        double pfa_max = nan;
        for (double v : r.global_pd) {
            if (!std::isnan(v) && (std::isnan(pd_min) || v < pd_min)) {
                pd_min = v;
            }
        }
        for (double v : r.global_pfa) {
            if (!std::isnan(v) && (std::isnan(pfa_max) || v > pfa_max)) {
                pfa_max = v;
            }
        }
        out << detail::format_double(r.axis_value) << ',' << labels[i] << ','
            << detail::format_double(r.mean_throughput) << ','
            << detail::format_double(r.ci95) << ',' << detail::format_double(pd_min)
            << ',' << detail::format_double(pfa_max) << ',' << r.constraint_mode << '\n';
    }
}

inline void write_consensus_csv(const std::filesystem::path& path,
                                const std::vector<ConsensusTraceRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "iteration,su_id,channel,statistic\n";
    for (const auto& r : rows) {
        out << r.iteration << ',' << r.su << ',' << r.channel << ','
            << detail::format_double(r.statistic) << '\n';
    }
}

} // namespace crnsim
