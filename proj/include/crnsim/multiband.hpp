#pragma once

// Multiband detector banks and the per-channel sensing-window optimizer.
//
// A bank is one branch per sensed channel. Branches are either empirical
// (they form a statistic from synthesized samples) or analytic (the decision
// is drawn from the branch's ROC, used for the ofdm kind and for any channel
// family that cannot be synthesized).

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <variant>
#include <vector>

#include "crnsim/channel.hpp"
#include "crnsim/detectors.hpp"
#include "crnsim/math.hpp"

namespace crnsim {

enum class MultibandKind : std::uint8_t { nmd, mjd, rmd };

inline const char* to_string(MultibandKind kind) noexcept {
    switch (kind) {
    case MultibandKind::nmd: return "nmd";
    case MultibandKind::mjd: return "mjd";
    case MultibandKind::rmd: return "rmd";
    }
    return "?";
}

struct MultibandBranch {
    DetectorSpec spec;
    int channel = 0;
    bool analytic = false;    // decision drawn from the ROC instead of samples
    double analytic_pfa = 0.0;
};

struct MultibandDetector {
    std::vector<MultibandBranch> branches;
    MultibandKind kind_label = MultibandKind::nmd;

    [[nodiscard]] long total_window() const noexcept {
        long total = 0;
        for (const auto& b : branches) {
            total += b.spec.window;
        }
        return total;
    }

    void validate() const {
        for (const auto& b : branches) {
            b.spec.validate();
        }
        if (kind_label == MultibandKind::nmd && !branches.empty()) {
            const double xi = branches.front().spec.threshold;
            for (const auto& b : branches) {
                if (b.spec.kind != DetectorKind::energy || b.spec.threshold != xi) {
                    throw std::invalid_argument(
                        "MultibandDetector: nmd requires identical energy branches");
                }
            }
        }
    }
};

/// Non-reconfigurable bank: one energy detector per channel, all sharing the
/// same window and threshold.
inline MultibandDetector build_nmd(int channel_count, int shared_window,
                                   double shared_threshold) {
    if (channel_count < 1) {
        throw std::invalid_argument("build_nmd: channel_count must be >= 1");
    }
    if (shared_window < 1) {
        throw std::invalid_argument("build_nmd: window must be >= 1");
    }
    MultibandDetector det;
    det.kind_label = MultibandKind::nmd;
    det.branches.resize(static_cast<std::size_t>(channel_count));
    for (int m = 0; m < channel_count; ++m) {
        auto& b = det.branches[static_cast<std::size_t>(m)];
        b.channel = m;
        b.spec = DetectorSpec{DetectorKind::energy, shared_window, shared_threshold, 1.0};
    }
    return det;
}

/// Reconfigurable bank: branch kind matched to each channel's signal family.
/// Windows and thresholds start at placeholder values and are filled in by
/// calibration or optimization.
inline MultibandDetector build_rmd(const std::vector<ChannelModel>& assignments) {
    if (assignments.empty()) {
        throw std::invalid_argument("build_rmd: no channel assignments");
    }
    MultibandDetector det;
    det.kind_label = MultibandKind::rmd;
    det.branches.reserve(assignments.size());
    for (const auto& ch : assignments) {
        MultibandBranch b;
        b.channel = ch.index;
        b.spec.kind = kind_for_family(ch.family);
        b.spec.window = 1;
        b.spec.theta = ch.pilot_theta;
        b.analytic = (b.spec.kind == DetectorKind::ofdm);
        det.branches.push_back(b);
    }
    return det;
}

/// Branch constraint: hold the per-sensor false alarm at a target.
struct FaTarget {
    double p_fa = 0.1;
};

/// Branch constraint: meet a global detection level that J co-fusing sensors
/// share under OR fusion, i.e. a per-sensor target of 1-(1-level)^(1/J).
struct ProtectionLevel {
    double p_d_global = 0.9;
    int cofusers = 1;
};

using BranchConstraint = std::variant<FaTarget, ProtectionLevel>;

/// Outcome of optimizing one branch.
struct BranchPlan {
    int window = 1;
    std::optional<double> threshold; // absent for analytic branches
    double local_p_fa = 0.0;         // per-sensor false alarm at the threshold
    double expected_throughput = 0.0;
};

namespace detail {

inline double per_sensor_detection_target(const ProtectionLevel& c) {
    if (!(c.p_d_global > 0.0 && c.p_d_global < 1.0) || c.cofusers < 1) {
        throw std::invalid_argument("ProtectionLevel: level outside (0,1) or cofusers < 1");
    }
    return 1.0 - std::pow(1.0 - c.p_d_global, 1.0 / static_cast<double>(c.cofusers));
}

} // namespace detail

/// Pick the sensing window that maximizes the expected-throughput objective
///   R(N) = (1 - N/tau) * (1 - p_m) * (1 - P_FA_global(N)) * tx_rate
/// subject to the constraint, over integer windows in [1, cap]. Under a
/// protection constraint P_FA_global(N) = 1-(1-p_fa_local(N))^J with the
/// per-sensor false alarm implied by the detection target; under a
/// false-alarm target it is the target itself. The search walks a step-10
/// grid and then refines to step 1 around the incumbent, which matches a
/// full integer scan because the objective is unimodal in N. Ties resolve to
/// the smallest window.
inline BranchPlan optimize_branch(const ChannelModel& channel, SnrValue snr,
                                  DetectorKind kind, int cap, int budget_frame,
                                  double tx_rate, const BranchConstraint& constraint) {
    if (cap < 1 || cap > budget_frame) {
        throw std::invalid_argument("optimize_branch: need 0 < cap <= budget_frame");
    }

    const double tau = static_cast<double>(budget_frame);
    const double idle = 1.0 - channel.pu_activity;

    double pd_local = 0.0;
    int cofusers = 1;
    const bool protect = std::holds_alternative<ProtectionLevel>(constraint);
    if (protect) {
        const auto& c = std::get<ProtectionLevel>(constraint);
        pd_local = detail::per_sensor_detection_target(c);
        cofusers = c.cofusers;
    } else {
        const double fa = std::get<FaTarget>(constraint).p_fa;
        if (!(fa > 0.0 && fa < 1.0)) {
            throw std::invalid_argument("FaTarget: p_fa outside (0,1)");
        }
    }

    // Local false alarm at window n, or nothing if the constraint cannot be
    // met there.
    auto local_pfa_at = [&](int n) -> std::optional<double> {
        if (!protect) {
            return std::get<FaTarget>(constraint).p_fa;
        }
        try {
            return calibrate_threshold_pd(kind, n, snr, pd_local, channel.pilot_theta)
                .implied_p_fa;
        } catch (const InfeasibleConstraintError&) {
            return std::nullopt;
        }
    };

    auto objective = [&](int n) -> double {
        const auto pfa = local_pfa_at(n);
        if (!pfa) {
            return -std::numeric_limits<double>::infinity();
        }
        const double pass = std::pow(1.0 - *pfa, static_cast<double>(cofusers));
        return (1.0 - static_cast<double>(n) / tau) * idle * pass * tx_rate;
    };

    // The implied false alarm is non-increasing in N, so feasibility at the
    // cap decides feasibility everywhere.
    if (!local_pfa_at(cap)) {
        std::ostringstream msg;
        msg << "optimize_branch: protection target infeasible for channel "
            << channel.index << " at every window in [1," << cap << "]"
            << " (kind=" << to_string(kind) << ", snr=" << snr.linear << ")";
        throw InfeasibleConstraintError(msg.str());
    }

    int best_n = 0;
    double best_r = -std::numeric_limits<double>::infinity();
    auto consider = [&](int n) {
        const double r = objective(n);
        if (r > best_r || (r == best_r && n < best_n)) {
            best_r = r;
            best_n = n;
        }
    };

    for (int n = 1; n <= cap; n += 10) {
        consider(n);
    }
    consider(cap);
    const int lo = std::max(1, best_n - 10);
    const int hi = std::min(cap, best_n + 10);
    for (int n = lo; n <= hi; ++n) {
        consider(n);
    }

    BranchPlan plan;
    plan.window = best_n;
    plan.expected_throughput = std::max(best_r, 0.0);
    if (protect) {
        const auto cal =
            calibrate_threshold_pd(kind, best_n, snr, pd_local, channel.pilot_theta);
        plan.local_p_fa = cal.implied_p_fa;
        plan.threshold = cal.threshold;
    } else {
        plan.local_p_fa = std::get<FaTarget>(constraint).p_fa;
        if (kind != DetectorKind::ofdm) {
            plan.threshold = calibrate_threshold_fa(kind, best_n, plan.local_p_fa);
        }
    }
    return plan;
}

/// Run every branch of a bank against its observation. Empirical branches
/// form their statistic and compare against the threshold; analytic branches
/// draw the decision as a Bernoulli with the ROC-given probability
/// conditioned on the observation's truth label.
inline std::vector<SensingDecision> sense_multiband(const MultibandDetector& detector,
                                                    std::span<const Observation> observations,
                                                    RandomStream& stream, int su_index = 0) {
    if (observations.size() != detector.branches.size()) {
        throw std::invalid_argument("sense_multiband: branch/observation count mismatch");
    }
    std::vector<SensingDecision> decisions(detector.branches.size());
    for (std::size_t i = 0; i < detector.branches.size(); ++i) {
        const auto& branch = detector.branches[i];
        const auto& obs = observations[i];
        auto& d = decisions[i];
        d.channel = branch.channel;
        d.su = su_index;
        if (branch.analytic) {
            const double p_busy_decl =
                obs.truth == Hypothesis::h1
                    ? roc(branch.spec.kind, branch.spec.window, obs.snr_used,
                          branch.spec.theta, branch.analytic_pfa)
                    : branch.analytic_pfa;
            d.statistic = std::numeric_limits<double>::quiet_NaN();
            d.decided = stream.uniform() < p_busy_decl ? Hypothesis::h1 : Hypothesis::h0;
        } else {
            d.statistic = branch.spec.kind == DetectorKind::pilot
                              ? pd_statistic(obs, pilot_sequence(branch.channel,
                                                                 branch.spec.window))
                              : ed_statistic(obs);
            d.decided = decide(d.statistic, branch.spec.threshold);
        }
    }
    return decisions;
}

} // namespace crnsim
