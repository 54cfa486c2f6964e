#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "crowdcount/dsp.hpp"

using namespace crowdcount;

TEST_CASE("sliding_max matches the worked examples") {
    const std::vector<double> x{1.0, 4.0, 2.0};
    const auto out = dsp::sliding_max(x, 3);
    CHECK(out == std::vector<double>{4.0, 4.0, 4.0});

    const std::vector<double> y{3.0, 1.0, 5.0, 2.0};
    CHECK(dsp::sliding_max(y, 1) == y);
}

TEST_CASE("sliding_max agrees with a naive per-window scan") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        const std::size_t w = 1 + rng() % 40;
        std::vector<double> x(n);
        for (double& v : x) v = val(rng);

        const auto fast = dsp::sliding_max(x, w);
        const std::size_t half_lo = (w - 1) / 2, half_hi = w / 2;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t lo = k >= half_lo ? k - half_lo : 0;
            const std::size_t hi = std::min(n - 1, k + half_hi);
            double best = x[lo];
            for (std::size_t i = lo; i <= hi; ++i) best = std::max(best, x[i]);
            REQUIRE(fast[k] == doctest::Approx(best));
        }
    }
}

TEST_CASE("sliding_max rejects empty input") {
    CHECK_THROWS_AS(dsp::sliding_max(std::vector<double>{}, 3), std::invalid_argument);
}

TEST_CASE("power quantile finds a pure tone within a bin") {
    const double fs = 200.0;
    const std::size_t n = 200;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(k) / fs + 0.31);
    const auto power = dsp::power_spectrum(x);
    const double q = dsp::power_quantile_bin_hz(power, fs / static_cast<double>(n), 0.95);
    CHECK(q >= 3.0);
    CHECK(q <= 4.0);

    const double qi = dsp::power_quantile_interp_hz(power, fs / static_cast<double>(n), 0.95);
    CHECK(qi >= 2.0);
    CHECK(qi <= 4.0);
}

TEST_CASE("two equal-power tones: 95% quantile lands at the upper tone") {
    const double fs = 200.0;
    const std::size_t n = 200;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / fs;
        x[k] = std::sin(2.0 * std::numbers::pi * 2.0 * t) + std::sin(2.0 * std::numbers::pi * 5.0 * t + 1.0);
    }
    const auto power = dsp::power_spectrum(x);
    const double q = dsp::power_quantile_interp_hz(power, fs / static_cast<double>(n), 0.95);
    CHECK(q >= 4.0);
    CHECK(q <= 6.0);
}

TEST_CASE("constant segment has zero spectral power after mean removal") {
    std::vector<double> x(128, 3.7);
    const auto power = dsp::power_spectrum(x);
    double total = 0.0;
    for (double p : power) total += p;
    CHECK(total == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(dsp::power_quantile_bin_hz(power, 1.0, 0.95) == 0.0);
}

TEST_CASE("zero-phase low-pass attenuates a one-sample spike below the raw peak") {
    std::vector<double> x(200, 0.0);
    x[100] = 1.0;
    const auto y = dsp::lowpass_zero_phase(x, 3.0, 100.0);
    double peak = 0.0;
    for (double v : y) peak = std::max(peak, std::abs(v));
    CHECK(peak < 1.0);
    CHECK(peak > 0.0);
}

TEST_CASE("low-pass leaves a slow sinusoid nearly intact and kills a fast one") {
    const double fs = 100.0;
    std::vector<double> slow(400), fast(400);
    for (std::size_t k = 0; k < slow.size(); ++k) {
        const double t = static_cast<double>(k) / fs;
        slow[k] = std::sin(2.0 * std::numbers::pi * 0.5 * t);
        fast[k] = std::sin(2.0 * std::numbers::pi * 30.0 * t);
    }
    const auto slow_f = dsp::lowpass_zero_phase(slow, 6.0, fs);
    const auto fast_f = dsp::lowpass_zero_phase(fast, 6.0, fs);
    double slow_rms = 0.0, fast_rms = 0.0;
    for (std::size_t k = 100; k < 300; ++k) {
        slow_rms += slow_f[k] * slow_f[k];
        fast_rms += fast_f[k] * fast_f[k];
    }
    CHECK(std::sqrt(slow_rms / 200.0) > 0.6);
    CHECK(std::sqrt(fast_rms / 200.0) < 0.05);
}

TEST_CASE("low-pass rejects cutoffs at or above Nyquist") {
    std::vector<double> x(10, 1.0);
    CHECK_THROWS_AS(dsp::lowpass_zero_phase(x, 50.0, 100.0), std::invalid_argument);
    CHECK_THROWS_AS(dsp::lowpass_zero_phase(x, 0.0, 100.0), std::invalid_argument);
}
