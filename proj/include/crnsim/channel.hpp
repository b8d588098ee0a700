#pragma once

// Licensed-channel model: per-channel primary-user activity, signal family,
// and synthesis of the complex baseband samples a secondary user observes
// when it senses a channel. Noise is circularly-symmetric complex Gaussian
// with unit variance, so sample power is 1 under H0 and 1 + SNR under H1.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "crnsim/math.hpp"

namespace crnsim {

enum class Hypothesis : std::uint8_t { h0, h1 };

enum class SignalFamily : std::uint8_t {
    unknown, // no usable structure; energy detection only
    pilot,   // known pilot pattern carrying a fraction theta of the power
    ofdm_cp  // cyclic-prefix OFDM; handled analytically, never synthesized
};

inline const char* to_string(SignalFamily family) noexcept {
    switch (family) {
    case SignalFamily::unknown: return "unknown";
    case SignalFamily::pilot: return "pilot";
    case SignalFamily::ofdm_cp: return "ofdm_cp";
    }
    return "?";
}

/// One licensed channel.
struct ChannelModel {
    int index = 0;                               // 0-based position in the band
    double pu_activity = 0.0;                    // probability the PU is active
    SignalFamily family = SignalFamily::unknown;
    double pilot_theta = 1.0;                    // pilot power fraction, (0,1]
    std::string label;                           // center-frequency tag, e.g. "f3"

    void validate() const {
        if (!(pu_activity >= 0.0 && pu_activity <= 1.0)) {
            throw std::invalid_argument("ChannelModel: pu_activity outside [0,1]");
        }
        if (family == SignalFamily::pilot && !(pilot_theta > 0.0 && pilot_theta <= 1.0)) {
            throw std::invalid_argument("ChannelModel: pilot theta outside (0,1]");
        }
    }
};

/// Sensed baseband samples for one (SU, channel) pair, with ground truth.
struct Observation {
    std::vector<std::complex<double>> samples;
    Hypothesis truth = Hypothesis::h0;
    SnrValue snr_used{1.0};
};

/// Per-channel PU occupancy for one trial.
struct SpectrumState {
    std::vector<bool> occupied;
};

/// PU activity probabilities drawn uniformly on (0,1), one per channel.
inline std::vector<double> sample_pu_activities(RandomStream& stream, int m_count) {
    if (m_count < 1) {
        throw std::invalid_argument("sample_pu_activities: m_count must be >= 1");
    }
    std::vector<double> p(static_cast<std::size_t>(m_count));
    for (auto& v : p) {
        v = stream.uniform();
    }
    return p;
}

/// Occupancy draw, independent across channels.
inline SpectrumState draw_spectrum_state(RandomStream& stream,
                                         const std::vector<ChannelModel>& channels) {
    if (channels.empty()) {
        throw std::invalid_argument("draw_spectrum_state: no channels");
    }
    SpectrumState state;
    state.occupied.resize(channels.size());
    for (std::size_t m = 0; m < channels.size(); ++m) {
        state.occupied[m] = stream.uniform() < channels[m].pu_activity;
    }
    return state;
}

/// Fixed unit-modulus pilot pattern for a channel. Derived from the channel
/// index alone so every SU correlates against the same sequence.
inline std::vector<std::complex<double>> pilot_sequence(int channel_index, int length) {
    if (length < 1) {
        throw std::invalid_argument("pilot_sequence: length must be >= 1");
    }
    RandomStream phases(0x70696C6F74ull, static_cast<std::uint64_t>(channel_index));
    std::vector<std::complex<double>> seq(static_cast<std::size_t>(length));
    for (auto& s : seq) {
        const double a = 2.0 * std::numbers::pi * phases.uniform();
        s = {std::cos(a), std::sin(a)};
    }
    return seq;
}

/// Synthesize the samples an SU collects on one channel over a sensing
/// window. Under H0 the samples are pure unit-variance noise. Under H1 a PU
/// signal of average power snr.linear is added:
///   unknown family  - circularly-symmetric complex Gaussian signal;
///   pilot family    - the channel's pilot pattern at power theta*snr plus a
///                     Gaussian data component at power (1-theta)*snr.
/// The ofdm_cp family has no sample-level model and is rejected.
inline Observation synthesize_observation(RandomStream& stream, const ChannelModel& channel,
                                          bool occupied, SnrValue snr, int window) {
    if (window < 1) {
        throw std::invalid_argument("synthesize_observation: window must be >= 1");
    }
    if (channel.family == SignalFamily::ofdm_cp) {
        throw std::invalid_argument(
            "synthesize_observation: ofdm_cp channels are analytic-only");
    }

    Observation obs;
    obs.truth = occupied ? Hypothesis::h1 : Hypothesis::h0;
    obs.snr_used = snr;
    obs.samples.resize(static_cast<std::size_t>(window));

    for (auto& y : obs.samples) {
        y = stream.complex_gaussian();
    }
    if (!occupied) {
        return obs;
    }

    if (channel.family == SignalFamily::pilot) {
        const double theta = channel.pilot_theta;
        const double pilot_amp = std::sqrt(theta * snr.linear);
        const double data_amp = std::sqrt((1.0 - theta) * snr.linear);
        const auto pilot = pilot_sequence(channel.index, window);
        for (std::size_t i = 0; i < obs.samples.size(); ++i) {
            obs.samples[i] += pilot_amp * pilot[i];
            if (data_amp > 0.0) {
                obs.samples[i] += data_amp * stream.complex_gaussian();
            }
        }
    } else {
        const double amp = std::sqrt(snr.linear);
        for (auto& y : obs.samples) {
            y += amp * stream.complex_gaussian();
        }
    }
    return obs;
}

} // namespace crnsim
