#pragma once

// Single-band spectrum sensors: test statistics, analytic ROC curves under
// the instantaneous-SNR AWGN condition, and threshold calibration against
// either a false-alarm target or a detection (protection) target.
//
// Conventions, all tied to unit-variance circularly-symmetric noise:
//   energy statistic   H0 ~ mean 1, variance 1/N
//   pilot statistic    H0 ~ N(0, 1/(2N)) exactly
// A decision is H1 iff statistic > threshold; ties resolve to H0.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>

#include "crnsim/channel.hpp"
#include "crnsim/math.hpp"

namespace crnsim {

/// Raised when a calibration target cannot be met by any threshold.
struct InfeasibleConstraintError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class DetectorKind : std::uint8_t { energy, pilot, ofdm };

inline const char* to_string(DetectorKind kind) noexcept {
    switch (kind) {
    case DetectorKind::energy: return "energy";
    case DetectorKind::pilot: return "pilot";
    case DetectorKind::ofdm: return "ofdm";
    }
    return "?";
}

/// Detector kind matched to a channel's signal family.
inline DetectorKind kind_for_family(SignalFamily family) noexcept {
    switch (family) {
    case SignalFamily::pilot: return DetectorKind::pilot;
    case SignalFamily::ofdm_cp: return DetectorKind::ofdm;
    case SignalFamily::unknown: break;
    }
    return DetectorKind::energy;
}

/// One configured sensor branch.
struct DetectorSpec {
    DetectorKind kind = DetectorKind::energy;
    int window = 1;          // sensing window N, samples
    double threshold = 0.0;  // decision threshold; unused for analytic ofdm
    double theta = 1.0;      // pilot power fraction, pilot kind only

    void validate() const {
        if (window < 1) {
            throw std::invalid_argument("DetectorSpec: window must be >= 1");
        }
        if (kind == DetectorKind::pilot && !(theta > 0.0 && theta <= 1.0)) {
            throw std::invalid_argument("DetectorSpec: theta outside (0,1]");
        }
    }
};

struct SensingDecision {
    double statistic = 0.0; // NaN for analytic branches
    Hypothesis decided = Hypothesis::h0;
    int channel = 0;
    int su = 0;
};

/// Average sample power over the window.
inline double ed_statistic(const Observation& obs) {
    if (obs.samples.empty()) {
        throw std::invalid_argument("ed_statistic: empty observation");
    }
    double acc = 0.0;
    for (const auto& y : obs.samples) {
        acc += std::norm(y);
    }
    return acc / static_cast<double>(obs.samples.size());
}

/// Real part of the pilot-matched correlation, normalized by the window.
inline double pd_statistic(const Observation& obs,
                           std::span<const std::complex<double>> pilot) {
    if (obs.samples.empty() || pilot.size() != obs.samples.size()) {
        throw std::invalid_argument("pd_statistic: pilot/observation length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < pilot.size(); ++i) {
        acc += pilot[i].real() * obs.samples[i].real() +
               pilot[i].imag() * obs.samples[i].imag();
    }
    return acc / static_cast<double>(obs.samples.size());
}

namespace detail {

inline void check_roc_args(int window, double p_fa) {
    if (window < 1) {
        throw std::invalid_argument("roc: window must be >= 1");
    }
    if (!(p_fa > 0.0 && p_fa < 1.0)) {
        throw std::invalid_argument("roc: p_fa must lie in (0,1)");
    }
}

} // namespace detail

/// Energy-detector detection probability at a false-alarm target.
inline double roc_ed(int window, SnrValue snr, double p_fa) {
    detail::check_roc_args(window, p_fa);
    const double n = static_cast<double>(window);
    const double g = snr.linear;
    return q_func((q_inv(p_fa) - std::sqrt(n) * g) / std::sqrt(2.0 * g + 1.0));
}

/// Pilot-detector detection probability at a false-alarm target.
inline double roc_pd(int window, SnrValue snr, double theta, double p_fa) {
    detail::check_roc_args(window, p_fa);
    if (!(theta > 0.0 && theta <= 1.0)) {
        throw std::invalid_argument("roc_pd: theta outside (0,1]");
    }
    const double n = static_cast<double>(window);
    return q_func(q_inv(p_fa) - std::sqrt(2.0 * theta * n * snr.linear));
}

/// Cyclic-prefix OFDM detector detection probability (analytic approximation).
inline double roc_ofdm(int window, SnrValue snr, double p_fa) {
    detail::check_roc_args(window, p_fa);
    const double n = static_cast<double>(window);
    const double g = snr.linear;
    return q_func((q_inv(p_fa) - std::sqrt(2.0 * n) * g) / std::sqrt(4.0 * g + 1.0));
}

inline double roc(DetectorKind kind, int window, SnrValue snr, double theta, double p_fa) {
    switch (kind) {
    case DetectorKind::energy: return roc_ed(window, snr, p_fa);
    case DetectorKind::pilot: return roc_pd(window, snr, theta, p_fa);
    case DetectorKind::ofdm: return roc_ofdm(window, snr, p_fa);
    }
    throw std::logic_error("roc: unknown detector kind");
}

/// Threshold achieving a target false-alarm probability under the H0
/// statistic distribution. The ofdm kind has no sample-level statistic, so no
/// threshold exists for it.
inline double calibrate_threshold_fa(DetectorKind kind, int window, double p_fa) {
    detail::check_roc_args(window, p_fa);
    const double n = static_cast<double>(window);
    switch (kind) {
    case DetectorKind::energy: return 1.0 + q_inv(p_fa) / std::sqrt(n);
    case DetectorKind::pilot: return q_inv(p_fa) * std::sqrt(1.0 / (2.0 * n));
    case DetectorKind::ofdm:
        throw std::invalid_argument("calibrate_threshold_fa: ofdm kind is analytic-only");
    }
    throw std::logic_error("calibrate_threshold_fa: unknown detector kind");
}

/// False-alarm probability implied by an already-chosen threshold.
inline double fa_from_threshold(DetectorKind kind, int window, double threshold) {
    if (window < 1) {
        throw std::invalid_argument("fa_from_threshold: window must be >= 1");
    }
    const double n = static_cast<double>(window);
    switch (kind) {
    case DetectorKind::energy: return q_func((threshold - 1.0) * std::sqrt(n));
    case DetectorKind::pilot: return q_func(threshold * std::sqrt(2.0 * n));
    case DetectorKind::ofdm:
        throw std::invalid_argument("fa_from_threshold: ofdm kind is analytic-only");
    }
    throw std::logic_error("fa_from_threshold: unknown detector kind");
}

/// Result of inverting a detector's ROC at a detection target.
struct ProtectionCalibration {
    std::optional<double> threshold; // absent for the analytic ofdm kind
    double implied_p_fa = 0.0;
};

/// Invert the detector's ROC for the threshold that meets a per-sensor
/// detection target at the given instantaneous SNR, and report the
/// false-alarm probability that threshold implies.
inline ProtectionCalibration calibrate_threshold_pd(DetectorKind kind, int window,
                                                    SnrValue snr, double p_d_target,
                                                    double theta = 1.0) {
    if (window < 1) {
        throw std::invalid_argument("calibrate_threshold_pd: window must be >= 1");
    }
    if (!(p_d_target > 0.0 && p_d_target < 1.0)) {
        throw std::invalid_argument("calibrate_threshold_pd: target outside (0,1)");
    }
    const double n = static_cast<double>(window);
    const double g = snr.linear;
    const double zd = q_inv(p_d_target);

    double implied = 0.0;
    switch (kind) {
    case DetectorKind::energy:
        implied = q_func(zd * std::sqrt(2.0 * g + 1.0) + std::sqrt(n) * g);
        break;
    case DetectorKind::pilot:
        implied = q_func(zd + std::sqrt(2.0 * theta * n * g));
        break;
    case DetectorKind::ofdm:
        implied = q_func(zd * std::sqrt(4.0 * g + 1.0) + std::sqrt(2.0 * n) * g);
        break;
    }
    if (!(implied < 1.0)) {
        throw InfeasibleConstraintError(
            "calibrate_threshold_pd: detection target needs a false-alarm rate >= 1");
    }
    // Q maps into (0,1) but can underflow to 0 for strong channels; clamp to
    // the smallest value the calibrated thresholds can represent.
    if (implied <= 0.0) {
        implied = std::numeric_limits<double>::min();
    }

    ProtectionCalibration out;
    out.implied_p_fa = implied;
    if (kind != DetectorKind::ofdm) {
        out.threshold = calibrate_threshold_fa(kind, window, implied);
    }
    return out;
}

/// Decision rule: H1 iff the statistic strictly exceeds the threshold.
inline Hypothesis decide(double statistic, double threshold) {
    if (!std::isfinite(statistic) || !std::isfinite(threshold)) {
        throw std::invalid_argument("decide: non-finite input");
    }
    return statistic > threshold ? Hypothesis::h1 : Hypothesis::h0;
}

} // namespace crnsim
