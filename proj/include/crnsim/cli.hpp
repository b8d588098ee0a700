#pragma once

// Command-line front end: figure presets, output-directory management, the
// run manifest, and the argv-level entry point used by the crnsim binary.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crnsim/experiments.hpp"

namespace crnsim {

/// Compiled-in figure presets, so reproducing a figure needs no hand-written
/// config.
enum class PresetName : std::uint8_t { fig4_roc, fig9a_protection, fig9b_snr, fig10_consensus };

inline std::optional<PresetName> preset_from_string(const std::string& name) {
    if (name == "fig4_roc") return PresetName::fig4_roc;
    if (name == "fig9a_protection") return PresetName::fig9a_protection;
    if (name == "fig9b_snr") return PresetName::fig9b_snr;
    if (name == "fig10_consensus") return PresetName::fig10_consensus;
    return std::nullopt;
}

inline const char* to_string(PresetName preset) noexcept {
    switch (preset) {
    case PresetName::fig4_roc: return "fig4_roc";
    case PresetName::fig9a_protection: return "fig9a_protection";
    case PresetName::fig9b_snr: return "fig9b_snr";
    case PresetName::fig10_consensus: return "fig10_consensus";
    }
    return "?";
}

/// Common run options every subcommand honors.
struct RunOptions {
    std::uint64_t seed = 1;
    long trials = 0; // 0 keeps the preset/config default
    int threads = 0; // 0 falls back to CRNSIM_THREADS, then 1
    std::filesystem::path out_dir = ".";

    [[nodiscard]] int resolved_threads() const {
        if (threads > 0) {
            return threads;
        }
        if (const char* env = std::getenv("CRNSIM_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) {
                return v;
            }
        }
        return 1;
    }
};

namespace detail {

inline ScenarioConfig fig9a_base(const RunOptions& opt) {
    ScenarioConfig c;
    c.level = ReconfigLevel::basic;
    c.k_count = 10;
    c.m_count = 5;
    c.i_per_su = 2;
    c.sample_budget = 10000;
    c.window_cap = 2500;
    c.constraint = ConstraintMode::protection;
    c.target_fa = 0.1;
    c.protection_level = 0.9;
    c.mean_snr_db = -15.0;
    c.su_tx_snr_db = 10.0;
    c.pilot_theta = 0.5;
    c.trials = opt.trials > 0 ? opt.trials : 200;
    c.master_seed = opt.seed;
    c.threads = opt.resolved_threads();
    return c;
}

inline ScenarioConfig fig9b_base(const RunOptions& opt) {
    ScenarioConfig c = fig9a_base(opt);
    c.level = ReconfigLevel::net_centralized;
    c.constraint = ConstraintMode::target_fa;
    c.window_cap = 5000;
    c.consensus = ConsensusParams{10, 0.25};
    return c;
}

inline ScenarioConfig fig10_base(const RunOptions& opt) {
    ScenarioConfig c = fig9a_base(opt);
    c.level = ReconfigLevel::net_distributed;
    c.window_cap = 1000;
    c.consensus = ConsensusParams{15, 0.1};
    c.trials = 1;
    return c;
}

inline void write_manifest(const std::filesystem::path& out_dir,
                           const std::string& subcommand, const std::string& preset,
                           const std::string& config_text, const RunOptions& opt,
                           const std::vector<std::string>& outputs, double wall_sec) {
    nlohmann::json j;
    j["tool"] = "crnsim";
    j["version"] = kVersion;
    j["subcommand"] = subcommand;
    j["preset"] = preset;
    j["master_seed"] = opt.seed;
    j["threads"] = opt.resolved_threads();
    j["config"] = config_text;
    j["outputs"] = outputs;
    j["wall_clock_sec"] = wall_sec;
    j["conventions"] = {
        {"throughput_units", "bits/s/Hz summed over SUs, averaged over trials"},
        {"protection_binding",
         "constraint=protection calibrates thresholds to the protection level; "
         "target_fa is reported, not simultaneously enforced"},
        {"target_fa_semantics", "per-SU per-channel false alarm before fusion"},
        {"consensus_scope",
         "statistics are exchanged only among SUs sensing the same channel with "
         "the same detector kind"},
        {"access_rule",
         "each SU transmits on its lowest-index declared-idle sensed channel; "
         "co-channel SUs split the rate equally"},
    };
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest.json");
    }
    out << j.dump(2) << '\n';
}

} // namespace detail

/// Run a preset into an output directory; returns the files written (not
/// counting the manifest, which the caller emits).
inline std::vector<std::string> run_preset(PresetName preset, const RunOptions& opt,
                                           std::string* config_echo = nullptr) {
    std::filesystem::create_directories(opt.out_dir);
    switch (preset) {
    case PresetName::fig4_roc: {
        RocParams params;
        params.master_seed = opt.seed;
        params.threads = opt.resolved_threads();
        if (opt.trials > 0) {
            params.trials = opt.trials;
        }
        if (config_echo) {
            *config_echo = "fig4_roc: window=1000 p_fa=0.1 theta=0.5 snr_db=[-25,0]";
        }
        write_roc_csv(opt.out_dir / "roc.csv", compute_roc_curve(params));
        return {"roc.csv"};
    }
    case PresetName::fig9a_protection: {
        const ScenarioConfig base = detail::fig9a_base(opt);
        if (config_echo) {
            *config_echo = serialize_config(base);
        }
        const std::vector<double> grid{0.80, 0.85, 0.90, 0.95, 0.99};
        struct Variant {
            ReconfigLevel level;
            int i_per_su;
        };
        const std::vector<Variant> variants{{ReconfigLevel::basic, 2},
                                            {ReconfigLevel::device_mjd, 2},
                                            {ReconfigLevel::device_rmd, 2},
                                            {ReconfigLevel::net_centralized, 2},
                                            {ReconfigLevel::net_centralized, 1}};
        std::vector<ThroughputReport> reports;
        std::vector<std::string> labels;
        for (const auto& v : variants) {
            ScenarioConfig c = base;
            c.level = v.level;
            c.i_per_su = v.i_per_su;
            auto points = sweep(c, SweepAxis::protection_level, grid);
            for (auto& r : points) {
                labels.push_back(std::string(to_string(v.level)) + "_i" +
                                 std::to_string(v.i_per_su));
                reports.push_back(std::move(r));
            }
        }
        write_sweep_csv(opt.out_dir / "sweep.csv", reports, labels);
        return {"sweep.csv"};
    }
    case PresetName::fig9b_snr: {
        const ScenarioConfig base = detail::fig9b_base(opt);
        if (config_echo) {
            *config_echo = serialize_config(base);
        }
        const std::vector<double> grid{-20.0, -17.5, -15.0, -12.5, -10.0, -7.5, -5.0};
        std::vector<ThroughputReport> reports;
        std::vector<std::string> labels;
        for (const auto level :
             {ReconfigLevel::net_centralized, ReconfigLevel::net_distributed}) {
            ScenarioConfig c = base;
            c.level = level;
            auto points = sweep(c, SweepAxis::mean_snr_db, grid);
            for (auto& r : points) {
                labels.emplace_back(to_string(level));
                reports.push_back(std::move(r));
            }
        }
        write_sweep_csv(opt.out_dir / "sweep.csv", reports, labels);
        return {"sweep.csv"};
    }
    case PresetName::fig10_consensus: {
        const ScenarioConfig c = detail::fig10_base(opt);
        if (config_echo) {
            *config_echo = serialize_config(c);
        }
        write_consensus_csv(opt.out_dir / "consensus_trace.csv",
                            compute_consensus_trace(c));
        return {"consensus_trace.csv"};
    }
    }
    throw std::logic_error("run_preset: unknown preset");
}

/// argv-level entry point. Exit code 0 on success, 1 on configuration or
/// validation errors, 2 on runtime failures.
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"crnsim: multiband spectrum-sensing and reconfiguration simulator"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string preset_name;
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "master seed");
        cmd->add_option("--trials", opt.trials, "Monte-Carlo trials (0 = default)");
        cmd->add_option("--threads", opt.threads,
                        "worker threads (0 = CRNSIM_THREADS or 1)");
        cmd->add_option("--out", opt.out_dir, "output directory");
    };

    auto* roc_cmd = app.add_subcommand("roc", "detector ROC curves");
    RocParams roc_params;
    add_common(roc_cmd);
    roc_cmd->add_option("--window", roc_params.window, "sensing window N");
    roc_cmd->add_option("--pfa", roc_params.p_fa, "false-alarm target");
    roc_cmd->add_option("--theta", roc_params.theta, "pilot power fraction");
    roc_cmd->add_option("--snr-min", roc_params.snr_db_min, "grid start, dB");
    roc_cmd->add_option("--snr-max", roc_params.snr_db_max, "grid end, dB");
    roc_cmd->add_option("--snr-step", roc_params.snr_db_step, "grid step, dB");

    auto* sweep_cmd = app.add_subcommand("sweep", "throughput sweeps");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--preset", preset_name, "fig9a_protection or fig9b_snr");
    sweep_cmd->add_option("--config", config_path, "scenario config file");
    std::string axis_name = "protection_level";
    std::string grid_spec;
    sweep_cmd->add_option("--axis", axis_name,
                          "protection_level | mean_snr_db | i_per_su");
    sweep_cmd->add_option("--grid", grid_spec, "comma-separated axis values");

    auto* consensus_cmd = app.add_subcommand("consensus", "consensus learning traces");
    add_common(consensus_cmd);
    consensus_cmd->add_option("--preset", preset_name, "fig10_consensus");
    consensus_cmd->add_option("--config", config_path, "scenario config file");

    auto* preset_cmd = app.add_subcommand("preset", "run a figure preset");
    add_common(preset_cmd);
    preset_cmd->add_option("--preset", preset_name, "preset name")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("crnsim");
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    };

    try {
        std::filesystem::create_directories(opt.out_dir);

        if (roc_cmd->parsed()) {
            roc_params.master_seed = opt.seed;
            roc_params.threads = opt.resolved_threads();
            if (opt.trials > 0) {
                roc_params.trials = opt.trials;
            }
            write_roc_csv(opt.out_dir / "roc.csv", compute_roc_curve(roc_params));
            detail::write_manifest(opt.out_dir, "roc", "", "window=" +
                                   std::to_string(roc_params.window),
                                   opt, {"roc.csv"}, elapsed());
            return 0;
        }

        if (preset_cmd->parsed()) {
            const auto preset = preset_from_string(preset_name);
            if (!preset) {
                throw ConfigError("unknown preset: " + preset_name);
            }
            std::string echo;
            const auto outputs = run_preset(*preset, opt, &echo);
            detail::write_manifest(opt.out_dir, "preset", preset_name, echo, opt,
                                   outputs, elapsed());
            return 0;
        }

        if (sweep_cmd->parsed()) {
            if (!preset_name.empty()) {
                const auto preset = preset_from_string(preset_name);
                if (!preset || (*preset != PresetName::fig9a_protection &&
                                *preset != PresetName::fig9b_snr)) {
                    throw ConfigError("sweep: preset must be fig9a_protection or fig9b_snr");
                }
                std::string echo;
                const auto outputs = run_preset(*preset, opt, &echo);
                detail::write_manifest(opt.out_dir, "sweep", preset_name, echo, opt,
                                       outputs, elapsed());
                return 0;
            }
            if (config_path.empty()) {
                throw ConfigError("sweep: need --preset or --config");
            }
            ScenarioConfig config = parse_config_file(config_path);
            if (opt.trials > 0) {
                config.trials = opt.trials;
            }
            config.master_seed = opt.seed;
            config.threads = opt.resolved_threads();

            SweepAxis axis;
            if (axis_name == "protection_level") {
                axis = SweepAxis::protection_level;
            } else if (axis_name == "mean_snr_db") {
                axis = SweepAxis::mean_snr_db;
            } else if (axis_name == "i_per_su") {
                axis = SweepAxis::i_per_su;
            } else {
                throw ConfigError("sweep: unknown axis " + axis_name);
            }
            std::vector<double> grid;
            std::stringstream ss(grid_spec);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!detail::trim(item).empty()) {
                    grid.push_back(std::stod(detail::trim(item)));
                }
            }
            if (grid.empty()) {
                throw ConfigError("sweep: --grid must list at least one value");
            }
            auto reports = sweep(config, axis, grid);
            std::vector<std::string> labels(reports.size(), to_string(config.level));
            write_sweep_csv(opt.out_dir / "sweep.csv", reports, labels);
            detail::write_manifest(opt.out_dir, "sweep", "", serialize_config(config),
                                   opt, {"sweep.csv"}, elapsed());
            return 0;
        }

        if (consensus_cmd->parsed()) {
            ScenarioConfig config;
            std::string preset_echo;
            if (!preset_name.empty()) {
                if (preset_from_string(preset_name) != PresetName::fig10_consensus) {
                    throw ConfigError("consensus: preset must be fig10_consensus");
                }
                config = detail::fig10_base(opt);
                preset_echo = preset_name;
            } else if (!config_path.empty()) {
                config = parse_config_file(config_path);
                config.master_seed = opt.seed;
                config.threads = opt.resolved_threads();
                if (opt.trials > 0) {
                    config.trials = opt.trials;
                }
            } else {
                throw ConfigError("consensus: need --preset or --config");
            }
            write_consensus_csv(opt.out_dir / "consensus_trace.csv",
                                compute_consensus_trace(config));
            detail::write_manifest(opt.out_dir, "consensus", preset_echo,
                                   serialize_config(config), opt,
                                   {"consensus_trace.csv"}, elapsed());
            return 0;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "crnsim: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "crnsim: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "crnsim: runtime error: %s\n", e.what());
        return 2;
    }
    return 0;
}

} // namespace crnsim
