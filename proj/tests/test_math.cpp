#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crnsim/math.hpp"

using namespace crnsim;

namespace {

// Independent high-precision tail function for cross-checking q_func.
long double q_oracle(long double x) {
    return 0.5L * erfcl(x / sqrtl(2.0L));
}

// Bisection inverse of q_func, independent of q_inv's implementation.
double q_inv_bisection(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (q_func(mid) > p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("q_func matches the standard Gaussian tail", "[math]") {
    CHECK(q_func(0.0) == 0.5);
    CHECK_THAT(q_func(1.2816), Catch::Matchers::WithinAbs(0.1, 1e-4));

    // reflection identity
    CHECK_THAT(q_func(-0.7), Catch::Matchers::WithinAbs(1.0 - q_func(0.7), 1e-15));

    // relative accuracy against an independent long-double evaluation
    for (int i = 0; i <= 1000; ++i) {
        const double x = -8.0 + 16.0 * static_cast<double>(i) / 1000.0;
        const long double ref = q_oracle(static_cast<long double>(x));
        const double rel =
            std::abs(static_cast<double>((static_cast<long double>(q_func(x)) - ref) / ref));
        REQUIRE(rel <= 1e-10);
    }

    CHECK_THROWS_AS(q_func(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
    CHECK_THROWS_AS(q_func(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST_CASE("q_func is strictly decreasing", "[math]") {
    double prev = q_func(-8.0);
    for (int i = 1; i <= 1000; ++i) {
        const double x = -8.0 + 16.0 * static_cast<double>(i) / 1000.0;
        const double cur = q_func(x);
        REQUIRE(cur < prev);
        prev = cur;
    }
}

TEST_CASE("q_inv inverts q_func", "[math]") {
    CHECK(q_inv(0.5) == 0.0);
    CHECK_THAT(q_inv(0.1), Catch::Matchers::WithinAbs(1.2816, 1e-3));
    CHECK_THAT(q_inv(0.1), Catch::Matchers::WithinAbs(q_inv_bisection(0.1), 1e-9));
    CHECK_THAT(q_inv(q_func(2.0)), Catch::Matchers::WithinAbs(2.0, 1e-8));

    for (double p : {1e-12, 1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0 - 1e-6}) {
        CHECK_THAT(q_func(q_inv(p)), Catch::Matchers::WithinAbs(p, 1e-9));
    }

    CHECK_THROWS_AS(q_inv(0.0), std::domain_error);
    CHECK_THROWS_AS(q_inv(1.0), std::domain_error);
    CHECK_THROWS_AS(q_inv(-0.2), std::domain_error);
    CHECK_THROWS_AS(q_inv(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("rayleigh SNR draws are exponential with the requested mean", "[math]") {
    RandomStream stream(42, 0);
    const long n = 1'000'000;

    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        const SnrValue v = draw_rayleigh_snr(stream, SnrValue(1.0));
        REQUIRE(v.linear > 0.0);
        sum += v.linear;
    }
    CHECK_THAT(sum / static_cast<double>(n), Catch::Matchers::WithinAbs(1.0, 0.01));

    // Kolmogorov-Smirnov distance to the exponential CDF at mean -15 dB.
    const double mean = 0.0316227766;
    std::vector<double> draws(static_cast<std::size_t>(n));
    RandomStream ks_stream(42, 1);
    for (auto& d : draws) {
        d = draw_rayleigh_snr(ks_stream, SnrValue(mean)).linear;
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double cdf = -std::expm1(-draws[i] / mean);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        ks = std::max({ks, std::abs(cdf - lo), std::abs(cdf - hi)});
    }
    CHECK(ks < 0.01);
}

TEST_CASE("streams replay exactly and are mutually independent", "[math]") {
    RandomStream a(1234, 7);
    RandomStream b(1234, 7);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(a.next_u64() == b.next_u64());
    }

    RandomStream s0(1234, 0);
    RandomStream s1(1234, 1);
    std::vector<double> x(100'000), y(100'000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = s0.uniform();
        y[i] = s1.uniform();
    }
    CHECK(std::abs(pearson_correlation(x, y)) < 0.01);
}

TEST_CASE("substreams do not depend on parent consumption", "[math]") {
    RandomStream a(99, 3);
    RandomStream b(99, 3);
    (void)b.next_u64();
    (void)b.next_u64();
    auto sa = a.substream(5);
    auto sb = b.substream(5);
    for (int i = 0; i < 100; ++i) {
        REQUIRE(sa.next_u64() == sb.next_u64());
    }
}

TEST_CASE("SnrValue converts between dB and linear", "[math]") {
    const SnrValue v = SnrValue::from_db(-15.0);
    CHECK_THAT(v.linear, Catch::Matchers::WithinAbs(0.0316227766, 1e-9));
    CHECK_THAT(SnrValue(v.linear).db(), Catch::Matchers::WithinRel(-15.0, 1e-12));
    CHECK_THROWS_AS(SnrValue(0.0), std::invalid_argument);
    CHECK_THROWS_AS(SnrValue(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(SnrValue(std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}
