#pragma once

// Numeric primitives shared by the whole simulator: standard-Gaussian tail
// functions, counter-based seeded random streams, and Rayleigh-fading SNR
// draws. Everything here is a pure function of its inputs; streams are value
// types that can be copied or moved across threads freely.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace crnsim {

namespace detail {

inline constexpr std::uint64_t kStreamGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Steele, Lea, Flood 2014); full-avalanche 64-bit mix.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

/// Deterministic counter-based random stream keyed by (master_seed, stream_id).
/// Output i is mix64(key + i*gamma), so the sequence depends only on the key
/// and the number of draws so far: identical keys replay identical sequences
/// regardless of thread placement, and distinct stream ids give statistically
/// independent sequences.
class RandomStream {
public:
    RandomStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
        : key_(detail::mix64(detail::mix64(master_seed + detail::kStreamGamma) ^
                             detail::mix64(stream_id ^ 0xA3C59AC2F0D9BE17ull))) {}

    /// Child stream derived from this stream's key and a tag. Derivation does
    /// not depend on how many draws were consumed from the parent.
    [[nodiscard]] RandomStream substream(std::uint64_t tag) const noexcept {
        return RandomStream(key_, tag);
    }

    std::uint64_t next_u64() noexcept {
        counter_ += detail::kStreamGamma;
        return detail::mix64(key_ + counter_);
    }

    /// Uniform draw strictly inside (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly-symmetric complex normal with E|z|^2 = 1.
    std::complex<double> complex_gaussian() noexcept {
        constexpr double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        const double re = gaussian();
        const double im = gaussian();
        return {re * inv_sqrt2, im * inv_sqrt2};
    }

    /// Exponential draw by inverse CDF; monotone increasing in the uniform.
    double exponential(double mean) noexcept {
        return -mean * std::log1p(-uniform());
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Dimensionless power ratio. Kept strictly positive.
struct SnrValue {
    double linear = 1.0;

    SnrValue() = default;
    explicit SnrValue(double linear_ratio) : linear(linear_ratio) {
        if (!(linear > 0.0) || !std::isfinite(linear)) {
            throw std::invalid_argument("SnrValue: linear ratio must be finite and > 0");
        }
    }

    static SnrValue from_db(double db) { return SnrValue(std::pow(10.0, db / 10.0)); }
    [[nodiscard]] double db() const { return 10.0 * std::log10(linear); }
};

/// Upper tail of the standard Gaussian, Q(x) = P(Z > x).
inline double q_func(double x) {
    if (!std::isfinite(x)) {
        throw std::invalid_argument("q_func: non-finite argument");
    }
    return 0.5 * std::erfc(x * (std::numbers::sqrt2 / 2.0));
}

namespace detail {

// Acklam's rational approximation to the standard normal quantile,
// |relative error| < 1.15e-9 over (0, 1).
inline double norm_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

inline double norm_pdf(double x) noexcept {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

} // namespace detail

/// Inverse of q_func on (0, 1). Rational seed plus two Newton corrections
/// against q_func itself, so the round trip holds to near machine precision.
inline double q_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("q_inv: argument must lie in (0, 1)");
    }
    double x = -detail::norm_quantile(p);
    for (int i = 0; i < 2; ++i) {
        const double pdf = detail::norm_pdf(x);
        if (pdf <= std::numeric_limits<double>::min()) {
            break; // tail so deep that the seed is already as good as it gets
        }
        x += (q_func(x) - p) / pdf;
    }
    return x;
}

/// One instantaneous-SNR draw under Rayleigh fading: exponentially
/// distributed with the given mean.
inline SnrValue draw_rayleigh_snr(RandomStream& stream, SnrValue mean_snr) {
    return SnrValue(stream.exponential(mean_snr.linear));
}

} // namespace crnsim
