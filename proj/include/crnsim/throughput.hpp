#pragma once

// End-to-end scenario evaluation: run one of the five reconfiguration
// strategies over many Monte-Carlo trials and report aggregate secondary
// throughput together with the per-channel protection metrics.
//
// Frame model: a frame holds sample_budget samples. An SU that transmits on
// a channel it sensed with window N earns (1 - N/sample_budget) of the frame
// at rate log2(1 + snr_tx), but only when the channel is truly idle; a
// transmission on a busy channel collides with the PU and earns nothing.
// SUs that picked the same channel split its rate equally.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "crnsim/channel.hpp"
#include "crnsim/cooperation.hpp"
#include "crnsim/detectors.hpp"
#include "crnsim/math.hpp"
#include "crnsim/multiband.hpp"

namespace crnsim {

enum class ReconfigLevel : std::uint8_t {
    basic,           // fixed windows, energy-only bank, one threshold per SU
    device_mjd,      // per-channel window/threshold optimization, energy only
    device_rmd,      // per-channel optimization with family-matched sensors
    net_centralized, // device_rmd plus SNR-driven task allocation by the FC
    net_distributed  // SNR-driven allocation, consensus learning, no FC
};

enum class ConstraintMode : std::uint8_t {
    protection, // thresholds meet the PU protection level; windows optimized
    target_fa   // thresholds meet the false-alarm target; windows stay fixed
};

inline const char* to_string(ReconfigLevel level) noexcept {
    switch (level) {
    case ReconfigLevel::basic: return "basic";
    case ReconfigLevel::device_mjd: return "device_mjd";
    case ReconfigLevel::device_rmd: return "device_rmd";
    case ReconfigLevel::net_centralized: return "net_centralized";
    case ReconfigLevel::net_distributed: return "net_distributed";
    }
    return "?";
}

inline const char* to_string(ConstraintMode mode) noexcept {
    return mode == ConstraintMode::protection ? "protection" : "target_fa";
}

struct ConsensusParams {
    int iterations = 10;
    double step = 0.25;
};

struct ScenarioConfig {
    ReconfigLevel level = ReconfigLevel::basic;
    int k_count = 10;
    int m_count = 5;
    int i_per_su = 2;
    int sample_budget = 10000;
    int window_cap = 2500;
    double target_fa = 0.1;
    double protection_level = 0.9;
    ConstraintMode constraint = ConstraintMode::protection;
    double mean_snr_db = -15.0;
    double su_tx_snr_db = 10.0;
    double pilot_theta = 0.5;
    ConsensusParams consensus;
    long trials = 100;
    std::uint64_t master_seed = 1;
    int threads = 1;

    void validate() const {
        if (k_count < 1) throw std::invalid_argument("config: k_count must be >= 1");
        if (m_count < 1) throw std::invalid_argument("config: m_count must be >= 1");
        if (i_per_su < 1 || i_per_su > m_count) {
            throw std::invalid_argument("config: i_per_su outside [1, m_count]");
        }
        if (window_cap < 1 || sample_budget < window_cap) {
            throw std::invalid_argument("config: need sample_budget >= window_cap >= 1");
        }
        if (!(target_fa > 0.0 && target_fa < 1.0)) {
            throw std::invalid_argument("config: target_fa outside (0,1)");
        }
        if (!(protection_level > 0.0 && protection_level < 1.0)) {
            throw std::invalid_argument("config: protection_level outside (0,1)");
        }
        if (!std::isfinite(mean_snr_db) || !std::isfinite(su_tx_snr_db)) {
            throw std::invalid_argument("config: non-finite SNR");
        }
        if (!(pilot_theta > 0.0 && pilot_theta <= 1.0)) {
            throw std::invalid_argument("config: pilot_theta outside (0,1]");
        }
        if (consensus.iterations < 0) {
            throw std::invalid_argument("config: consensus_iterations must be >= 0");
        }
        if (!(consensus.step >= 0.0 && consensus.step < 1.0)) {
            throw std::invalid_argument("config: consensus_step outside [0,1)");
        }
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    }

    /// Per-branch sensing window actually used: the configured cap trimmed so
    /// that i_per_su branches always fit the frame budget.
    [[nodiscard]] int effective_window() const noexcept {
        return std::min(window_cap, sample_budget / i_per_su);
    }

    [[nodiscard]] double tx_rate() const noexcept {
        return std::log2(1.0 + std::pow(10.0, su_tx_snr_db / 10.0));
    }
};

/// The spectrum environment one experiment runs in. PU activities are drawn
/// once per experiment and held fixed across trials and strategies so that
/// strategy comparisons share the same spectrum.
struct Environment {
    std::vector<ChannelModel> channels;
    std::vector<Point2> positions; // SU locations, used by distributed runs
};

namespace detail {

// Fixed substream tags inside one trial.
inline constexpr std::uint64_t kTagEnv = 0x8000000000000001ull;
inline constexpr std::uint64_t kTagOccupancy = 1;
inline constexpr std::uint64_t kTagSnr = 2;
inline constexpr std::uint64_t kTagAllocation = 3;
inline constexpr std::uint64_t kTagAnalytic = 4;
inline constexpr std::uint64_t kTagObservation = 16;

// Channel family pattern: two pilot channels, two unstructured channels, one
// cyclic-prefix OFDM channel, repeating for wider bands.
inline SignalFamily family_pattern(int m) noexcept {
    switch (m % 5) {
    case 0:
    case 1: return SignalFamily::pilot;
    case 2:
    case 3: return SignalFamily::unknown;
    default: return SignalFamily::ofdm_cp;
    }
}

} // namespace detail

inline Environment make_environment(const ScenarioConfig& config) {
    RandomStream env_stream(config.master_seed, detail::kTagEnv);
    Environment env;
    env.channels.resize(static_cast<std::size_t>(config.m_count));
    const auto activities = sample_pu_activities(env_stream, config.m_count);
    for (int m = 0; m < config.m_count; ++m) {
        auto& ch = env.channels[static_cast<std::size_t>(m)];
        ch.index = m;
        ch.pu_activity = activities[static_cast<std::size_t>(m)];
        ch.family = detail::family_pattern(m);
        ch.pilot_theta = config.pilot_theta;
        ch.label = "f" + std::to_string(m + 1);
        ch.validate();
    }
    env.positions.resize(static_cast<std::size_t>(config.k_count));
    for (auto& p : env.positions) {
        p.x = env_stream.uniform();
        p.y = env_stream.uniform();
    }
    return env;
}

/// What one trial recorded for one channel.
struct ChannelTrialOutcome {
    bool busy = false;          // ground truth
    bool decided = false;       // at least one SU sensed the channel
    bool declared_busy = false; // no SU would transmit on it
};

struct TrialResult {
    double throughput = 0.0;
    std::vector<ChannelTrialOutcome> channels;
    bool infeasible = false; // calibration infeasible; trial scored as zero
};

struct ThroughputReport {
    std::string level;
    std::string constraint_mode;
    std::string allocation_mode;
    double axis_value = 0.0; // filled by sweep()
    double mean_throughput = 0.0;
    double ci95 = 0.0;
    std::vector<double> global_pd;  // per channel; NaN when never measured
    std::vector<double> global_pfa; // per channel; NaN when never measured
    long trials = 0;
    long infeasible_trials = 0;
    long busy_observations = 0; // channel-trials with a busy PU and a decision
    long missed_detections = 0; // of those, how many were declared idle
    long idle_observations = 0;
    long false_alarms = 0;

    [[nodiscard]] double missed_detection_rate() const noexcept {
        return busy_observations == 0
                   ? 0.0
                   : static_cast<double>(missed_detections) /
                         static_cast<double>(busy_observations);
    }
};

namespace detail {

struct SuBank {
    MultibandDetector detector;
    std::vector<SensingDecision> decisions;
};

// Windows and thresholds for one SU's bank under the configured level and
// constraint. `snr_row` holds the SU's instantaneous SNRs across all
// channels; `cofusers` the per-channel co-sensing counts from the
// allocation.
inline MultibandDetector configure_bank(const ScenarioConfig& config,
                                        const Environment& env,
                                        const std::vector<int>& sensed,
                                        const std::vector<double>& snr_row,
                                        const std::vector<int>& cofusers) {
    const int fixed_window = config.effective_window();
    const bool energy_only = config.level == ReconfigLevel::basic ||
                             config.level == ReconfigLevel::device_mjd;
    const bool optimized = config.constraint == ConstraintMode::protection &&
                           (config.level == ReconfigLevel::device_mjd ||
                            config.level == ReconfigLevel::device_rmd ||
                            config.level == ReconfigLevel::net_centralized);

    MultibandDetector bank;
    bank.kind_label = config.level == ReconfigLevel::basic ? MultibandKind::nmd
                      : energy_only                        ? MultibandKind::mjd
                                                           : MultibandKind::rmd;
    bank.branches.reserve(sensed.size());

    for (int m : sensed) {
        const auto& ch = env.channels[static_cast<std::size_t>(m)];
        MultibandBranch b;
        b.channel = m;
        b.spec.kind = energy_only ? DetectorKind::energy : kind_for_family(ch.family);
        b.spec.theta = ch.pilot_theta;
        // A branch is analytic when its detector has no sample statistic or
        // when the channel family cannot be synthesized.
        b.analytic = b.spec.kind == DetectorKind::ofdm ||
                     ch.family == SignalFamily::ofdm_cp;

        const SnrValue snr(snr_row[static_cast<std::size_t>(m)]);
        const int j = cofusers[static_cast<std::size_t>(m)];

        if (config.constraint == ConstraintMode::target_fa) {
            b.spec.window = fixed_window;
            b.analytic_pfa = config.target_fa;
            if (b.spec.kind != DetectorKind::ofdm) {
                b.spec.threshold =
                    calibrate_threshold_fa(b.spec.kind, b.spec.window, config.target_fa);
            }
        } else if (!optimized) {
            // basic and net_distributed: fixed window, protection-calibrated
            // threshold per branch (basic then shares the strictest one).
            b.spec.window = fixed_window;
            const double pd_local =
                1.0 - std::pow(1.0 - config.protection_level,
                               1.0 / static_cast<double>(std::max(1, j)));
            const auto cal = calibrate_threshold_pd(b.spec.kind, b.spec.window, snr,
                                                    pd_local, b.spec.theta);
            b.analytic_pfa = cal.implied_p_fa;
            if (cal.threshold) {
                b.spec.threshold = *cal.threshold;
            }
        } else {
            const auto plan = optimize_branch(
                ch, snr, b.spec.kind, fixed_window, config.sample_budget,
                config.tx_rate(), ProtectionLevel{config.protection_level, std::max(1, j)});
            b.spec.window = plan.window;
            b.analytic_pfa = plan.local_p_fa;
            if (plan.threshold) {
                b.spec.threshold = *plan.threshold;
            }
        }
        bank.branches.push_back(b);
    }

    // The basic bank reconfigures nothing per channel: one threshold serves
    // every branch. Under protection it must be the strictest branch
    // threshold so the detection target holds on every channel.
    if (config.level == ReconfigLevel::basic &&
        config.constraint == ConstraintMode::protection && !bank.branches.empty()) {
        double shared = bank.branches.front().spec.threshold;
        for (const auto& b : bank.branches) {
            shared = std::min(shared, b.spec.threshold);
        }
        for (auto& b : bank.branches) {
            b.spec.threshold = shared;
            if (b.analytic) {
                b.analytic_pfa = fa_from_threshold(DetectorKind::energy,
                                                   b.spec.window, shared);
            }
        }
    }
    return bank;
}

} // namespace detail

/// Execute one Monte-Carlo trial. Deterministic in (config, env, trial_index,
/// stream_offset) alone.
inline TrialResult run_trial(const ScenarioConfig& config, const Environment& env,
                             long trial_index, std::uint64_t stream_offset = 0) {
    const int k_count = config.k_count;
    const int m_count = config.m_count;
    RandomStream base(config.master_seed,
                      stream_offset + static_cast<std::uint64_t>(trial_index));
    auto occupancy_stream = base.substream(detail::kTagOccupancy);
    auto snr_stream = base.substream(detail::kTagSnr);
    auto alloc_stream = base.substream(detail::kTagAllocation);

    const SpectrumState state = draw_spectrum_state(occupancy_stream, env.channels);

    const SnrValue mean_snr = SnrValue::from_db(config.mean_snr_db);
    std::vector<std::vector<double>> snr(static_cast<std::size_t>(k_count),
                                         std::vector<double>(static_cast<std::size_t>(m_count)));
    for (auto& row : snr) {
        for (auto& v : row) {
            v = draw_rayleigh_snr(snr_stream, mean_snr).linear;
        }
    }

    const bool snr_driven = config.level == ReconfigLevel::net_centralized ||
                            config.level == ReconfigLevel::net_distributed;
    const Allocation alloc = snr_driven
                                 ? allocate_best_snr(snr, config.i_per_su)
                                 : allocate_basic(k_count, m_count, config.i_per_su,
                                                  alloc_stream);
    std::vector<int> cofusers(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
        cofusers[static_cast<std::size_t>(m)] =
            static_cast<int>(alloc.sus_of_channel[static_cast<std::size_t>(m)].size());
    }

    TrialResult result;
    result.channels.resize(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
        result.channels[static_cast<std::size_t>(m)].busy =
            state.occupied[static_cast<std::size_t>(m)];
        result.channels[static_cast<std::size_t>(m)].decided =
            cofusers[static_cast<std::size_t>(m)] > 0;
    }

    // Configure every SU's bank; an infeasible calibration anywhere voids the
    // trial.
    std::vector<detail::SuBank> banks(static_cast<std::size_t>(k_count));
    try {
        for (int k = 0; k < k_count; ++k) {
            banks[static_cast<std::size_t>(k)].detector = detail::configure_bank(
                config, env, alloc.channels_of_su[static_cast<std::size_t>(k)],
                snr[static_cast<std::size_t>(k)], cofusers);
        }
    } catch (const InfeasibleConstraintError&) {
        result.infeasible = true;
        return result;
    }

    // Sense.
    for (int k = 0; k < k_count; ++k) {
        auto& bank = banks[static_cast<std::size_t>(k)];
        std::vector<Observation> observations;
        observations.reserve(bank.detector.branches.size());
        for (const auto& branch : bank.detector.branches) {
            const int m = branch.channel;
            const auto& ch = env.channels[static_cast<std::size_t>(m)];
            const bool occupied = state.occupied[static_cast<std::size_t>(m)];
            const SnrValue branch_snr(
                snr[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]);
            if (branch.analytic) {
                Observation stub;
                stub.truth = occupied ? Hypothesis::h1 : Hypothesis::h0;
                stub.snr_used = branch_snr;
                observations.push_back(std::move(stub));
            } else {
                auto obs_stream = base.substream(
                    detail::kTagObservation +
                    static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(m_count) +
                    static_cast<std::uint64_t>(m));
                observations.push_back(synthesize_observation(
                    obs_stream, ch, occupied, branch_snr, branch.spec.window));
            }
        }
        auto analytic_stream = base.substream(detail::kTagAnalytic)
                                   .substream(static_cast<std::uint64_t>(k));
        bank.decisions =
            sense_multiband(bank.detector, observations, analytic_stream, k);
    }

    // Index of SU k's branch for channel m, or -1.
    auto branch_index = [&](int k, int m) -> int {
        const auto& branches = banks[static_cast<std::size_t>(k)].detector.branches;
        for (std::size_t i = 0; i < branches.size(); ++i) {
            if (branches[i].channel == m) {
                return static_cast<int>(i);
            }
        }
        return -1;
    };

    // Combine: fused decision per channel for the centralized levels,
    // consensus plus local decisions for the distributed one.
    // declares_idle[k][m] says whether SU k may transmit on channel m.
    std::vector<std::vector<bool>> declares_idle(
        static_cast<std::size_t>(k_count),
        std::vector<bool>(static_cast<std::size_t>(m_count), false));

    if (config.level == ReconfigLevel::net_distributed) {
        const double radius = min_clique_radius(env.positions, alloc.sus_of_channel);
        const NeighborGraph graph = build_geometric_graph(env.positions, radius);
        for (int m = 0; m < m_count; ++m) {
            const auto& members = alloc.sus_of_channel[static_cast<std::size_t>(m)];
            if (members.empty()) {
                continue;
            }
            const bool analytic_channel =
                env.channels[static_cast<std::size_t>(m)].family == SignalFamily::ofdm_cp;
            if (analytic_channel) {
                for (int k : members) {
                    const int bi = branch_index(k, m);
                    declares_idle[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
                        banks[static_cast<std::size_t>(k)]
                            .decisions[static_cast<std::size_t>(bi)]
                            .decided == Hypothesis::h0;
                }
            } else {
                std::vector<double> values;
                std::vector<double> thresholds;
                values.reserve(members.size());
                thresholds.reserve(members.size());
                for (int k : members) {
                    const int bi = branch_index(k, m);
                    const auto& bank = banks[static_cast<std::size_t>(k)];
                    values.push_back(
                        bank.decisions[static_cast<std::size_t>(bi)].statistic);
                    thresholds.push_back(
                        bank.detector.branches[static_cast<std::size_t>(bi)].spec.threshold);
                }
                ConsensusState cs;
                cs.channel = m;
                cs.members = members;
                cs.values = std::move(values);
                cs.step = config.consensus.step;
                const double stable = max_stable_step(cs, graph);
                if (cs.step >= stable) {
                    cs.step = 0.99 * stable;
                }
                for (int i = 0; i < config.consensus.iterations; ++i) {
                    cs = consensus_step(cs, graph);
                }
                const auto post = decide_post_consensus(cs, thresholds);
                for (std::size_t a = 0; a < post.size(); ++a) {
                    declares_idle[static_cast<std::size_t>(post[a].su)]
                                 [static_cast<std::size_t>(m)] =
                                     post[a].decided == Hypothesis::h0;
                }
            }
        }
        for (int m = 0; m < m_count; ++m) {
            const auto& members = alloc.sus_of_channel[static_cast<std::size_t>(m)];
            if (members.empty()) {
                continue;
            }
            bool any_idle = false;
            for (int k : members) {
                any_idle = any_idle ||
                           declares_idle[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
            }
            result.channels[static_cast<std::size_t>(m)].declared_busy = !any_idle;
        }
    } else {
        std::vector<Hypothesis> local;
        for (int m = 0; m < m_count; ++m) {
            const auto& members = alloc.sus_of_channel[static_cast<std::size_t>(m)];
            if (members.empty()) {
                continue;
            }
            local.clear();
            for (int k : members) {
                const int bi = branch_index(k, m);
                local.push_back(banks[static_cast<std::size_t>(k)]
                                    .decisions[static_cast<std::size_t>(bi)]
                                    .decided);
            }
            const Hypothesis fused = fuse_or(local);
            result.channels[static_cast<std::size_t>(m)].declared_busy =
                fused == Hypothesis::h1;
            if (fused == Hypothesis::h0) {
                for (int k : members) {
                    declares_idle[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] =
                        true;
                }
            }
        }
    }

    // Spectrum access: each SU transmits on the lowest-index channel of its
    // sensing list that it may use.
    std::vector<int> chosen(static_cast<std::size_t>(k_count), -1);
    std::vector<int> sharers(static_cast<std::size_t>(m_count), 0);
    for (int k = 0; k < k_count; ++k) {
        for (int m : alloc.channels_of_su[static_cast<std::size_t>(k)]) {
            if (declares_idle[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]) {
                chosen[static_cast<std::size_t>(k)] = m;
                ++sharers[static_cast<std::size_t>(m)];
                break;
            }
        }
    }

    const double rate = config.tx_rate();
    const double tau = static_cast<double>(config.sample_budget);
    for (int k = 0; k < k_count; ++k) {
        const int m = chosen[static_cast<std::size_t>(k)];
        if (m < 0 || state.occupied[static_cast<std::size_t>(m)]) {
            continue; // nothing to use, or collided with the PU
        }
        const int bi = branch_index(k, m);
        const int used_window = banks[static_cast<std::size_t>(k)]
                                    .detector.branches[static_cast<std::size_t>(bi)]
                                    .spec.window;
        result.throughput += (1.0 - static_cast<double>(used_window) / tau) * rate /
                             static_cast<double>(sharers[static_cast<std::size_t>(m)]);
    }
    return result;
}

/// Average run_trial over the configured number of trials with independent
/// per-trial streams. Trials may execute on several threads; the aggregation
/// order is fixed by trial index, so reports are identical for any thread
/// count.
inline ThroughputReport run_scenario(const ScenarioConfig& config, const Environment& env,
                                     std::uint64_t stream_offset = 0) {
    config.validate();
    const long trials = config.trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));

    const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(trials)));
    if (threads == 1) {
        for (long t = 0; t < trials; ++t) {
            results[static_cast<std::size_t>(t)] =
                run_trial(config, env, t, stream_offset);
        }
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (long t = w; t < trials; t += threads) {
                    results[static_cast<std::size_t>(t)] =
                        run_trial(config, env, t, stream_offset);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    ThroughputReport report;
    report.level = to_string(config.level);
    report.constraint_mode = to_string(config.constraint);
    report.allocation_mode = (config.level == ReconfigLevel::net_centralized ||
                              config.level == ReconfigLevel::net_distributed)
                                 ? "best_snr"
                                 : "balanced";
    report.trials = trials;
    report.global_pd.assign(static_cast<std::size_t>(config.m_count), 0.0);
    report.global_pfa.assign(static_cast<std::size_t>(config.m_count), 0.0);

    std::vector<long> busy(static_cast<std::size_t>(config.m_count), 0);
    std::vector<long> busy_declared(static_cast<std::size_t>(config.m_count), 0);
    std::vector<long> idle(static_cast<std::size_t>(config.m_count), 0);
    std::vector<long> idle_declared(static_cast<std::size_t>(config.m_count), 0);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& r : results) {
        sum += r.throughput;
        sum_sq += r.throughput * r.throughput;
        if (r.infeasible) {
            ++report.infeasible_trials;
        }
        for (std::size_t m = 0; m < r.channels.size(); ++m) {
            const auto& c = r.channels[m];
            if (!c.decided) {
                continue;
            }
            if (c.busy) {
                ++busy[m];
                busy_declared[m] += c.declared_busy ? 1 : 0;
            } else {
                ++idle[m];
                idle_declared[m] += c.declared_busy ? 1 : 0;
            }
        }
    }

    const double n = static_cast<double>(trials);
    report.mean_throughput = sum / n;
    const double variance =
        trials > 1 ? std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)) : 0.0;
    report.ci95 = trials > 1 ? 1.96 * std::sqrt(variance / n) : 0.0;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t m = 0; m < report.global_pd.size(); ++m) {
        report.global_pd[m] =
            busy[m] > 0 ? static_cast<double>(busy_declared[m]) /
                              static_cast<double>(busy[m])
                        : nan;
        report.global_pfa[m] =
            idle[m] > 0 ? static_cast<double>(idle_declared[m]) /
                              static_cast<double>(idle[m])
                        : nan;
        report.busy_observations += busy[m];
        report.missed_detections += busy[m] - busy_declared[m];
        report.idle_observations += idle[m];
        report.false_alarms += idle_declared[m];
    }
    return report;
}

inline ThroughputReport run_scenario(const ScenarioConfig& config) {
    return run_scenario(config, make_environment(config));
}

enum class SweepAxis : std::uint8_t { protection_level, mean_snr_db, i_per_su };

inline const char* to_string(SweepAxis axis) noexcept {
    switch (axis) {
    case SweepAxis::protection_level: return "protection_level";
    case SweepAxis::mean_snr_db: return "mean_snr_db";
    case SweepAxis::i_per_su: return "i_per_su";
    }
    return "?";
}

/// One report per grid value. All points share the environment drawn from the
/// master seed; trial streams are offset per point.
inline std::vector<ThroughputReport> sweep(const ScenarioConfig& config, SweepAxis axis,
                                           const std::vector<double>& values) {
    if (values.empty()) {
        throw std::invalid_argument("sweep: empty grid");
    }
    config.validate();
    const Environment env = make_environment(config);
    std::vector<ThroughputReport> reports;
    reports.reserve(values.size());
    for (std::size_t p = 0; p < values.size(); ++p) {
        ScenarioConfig point = config;
        switch (axis) {
        case SweepAxis::protection_level: point.protection_level = values[p]; break;
        case SweepAxis::mean_snr_db: point.mean_snr_db = values[p]; break;
        case SweepAxis::i_per_su: point.i_per_su = static_cast<int>(values[p]); break;
        }
        point.validate();
        auto report = run_scenario(
            point, env, static_cast<std::uint64_t>(p) * static_cast<std::uint64_t>(config.trials));
        report.axis_value = values[p];
        reports.push_back(std::move(report));
    }
    return reports;
}

} // namespace crnsim
