#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "crowdcount/carson.hpp"
#include "crowdcount/motion_model.hpp"

using namespace crowdcount;

namespace {

SpeedProfile constant_profile(double speed, double duration_s = 10.0, double fs = 200.0) {
    SpeedProfile p;
    p.sample_rate = fs;
    p.channels.push_back(std::vector<double>(static_cast<std::size_t>(duration_s * fs), speed));
    return p;
}

}  // namespace

TEST_CASE("all-zero profile maps to all-zero bandwidth") {
    const auto bw = carson_bandwidth(constant_profile(0.0), CarsonConfig{});
    for (double v : bw.values) CHECK(v == 0.0);
    CHECK(bw.sample_period_s == doctest::Approx(0.01));
}

TEST_CASE("constant 0.1 m/s at 5.32 GHz gives about 3.55 Hz") {
    CarsonConfig cfg;  // wavelength 0.0564, psi 2
    const auto bw = carson_bandwidth(constant_profile(0.1), cfg);
    const double expected = 2.0 * 0.1 / 0.0564;
    for (std::size_t k = 0; k < bw.values.size(); ++k)
        CHECK(bw.values[k] == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(3.546).epsilon(1e-3));
}

TEST_CASE("speed_band of a constant channel is zero") {
    const auto p = constant_profile(0.3);
    CHECK(speed_band(p.channels[0], p.sample_rate, CarsonConfig{}, 300) == 0.0);
}

TEST_CASE("speed_band finds a 3 Hz sinusoidal speed within one bin") {
    SpeedProfile p;
    p.sample_rate = 200.0;
    std::vector<double> v(2000);
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = 0.2 + 0.1 * std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(k) / 200.0);
    p.channels.push_back(v);
    const double f0 = speed_band(p.channels[0], p.sample_rate, CarsonConfig{}, 500);  // t = 5 s
    CHECK(f0 == doctest::Approx(3.0).epsilon(0.34));  // 3 Hz +/- one 1 Hz bin
}

TEST_CASE("speed_band two-tone quantile sits at the upper tone") {
    SpeedProfile p;
    p.sample_rate = 200.0;
    std::vector<double> v(2000);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double t = static_cast<double>(k) / 200.0;
        v[k] = 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * 2.0 * t) +
               0.1 * std::sin(2.0 * std::numbers::pi * 5.0 * t + 0.8);
    }
    p.channels.push_back(v);
    const double f0 = speed_band(p.channels[0], p.sample_rate, CarsonConfig{}, 500);
    CHECK(f0 >= 4.0);
    CHECK(f0 <= 6.0);
}

TEST_CASE("dominant channel decides the combined bandwidth") {
    SpeedProfile both;
    both.sample_rate = 100.0;
    both.channels.push_back(std::vector<double>(1000, 0.4));  // dominant
    both.channels.push_back(std::vector<double>(1000, 0.1));
    SpeedProfile solo;
    solo.sample_rate = 100.0;
    solo.channels.push_back(std::vector<double>(1000, 0.4));

    const CarsonConfig cfg;
    const auto bw_both = carson_bandwidth(both, cfg);
    const auto bw_solo = carson_bandwidth(solo, cfg);
    REQUIRE(bw_both.values.size() == bw_solo.values.size());
    for (std::size_t k = 0; k < bw_both.values.size(); ++k)
        CHECK(bw_both.values[k] == doctest::Approx(bw_solo.values[k]).epsilon(1e-12));
}

TEST_CASE("carson equals max_combine of single-channel runs") {
    FidgetProcessParams params;
    params.seed = 11;
    params.n_body_parts = 3;
    const auto profile = synth_fidget_profile(params, 20.0, 50.0);

    const CarsonConfig cfg;
    const auto combined = carson_bandwidth(profile, cfg);

    std::vector<BandwidthSeries> singles;
    for (const auto& ch : profile.channels) {
        SpeedProfile solo;
        solo.sample_rate = profile.sample_rate;
        solo.channels.push_back(ch);
        singles.push_back(carson_bandwidth(solo, cfg));
    }
    const auto merged = max_combine(singles);
    REQUIRE(merged.values.size() == combined.values.size());
    for (std::size_t k = 0; k < merged.values.size(); ++k)
        CHECK(merged.values[k] == doctest::Approx(combined.values[k]).epsilon(1e-12));
}

TEST_CASE("raising a speed channel never lowers the bandwidth") {
    FidgetProcessParams params;
    params.seed = 23;
    params.n_body_parts = 2;
    auto profile = synth_fidget_profile(params, 15.0, 50.0);
    const auto before = carson_bandwidth(profile, CarsonConfig{});
    for (double& v : profile.channels[0]) v += 0.05;
    const auto after = carson_bandwidth(profile, CarsonConfig{});
    for (std::size_t k = 0; k < before.values.size(); ++k)
        CHECK(after.values[k] >= before.values[k] - 1e-9);
}

TEST_CASE("doubling wavelength halves constant-speed bandwidth") {
    CarsonConfig cfg;
    const auto bw1 = carson_bandwidth(constant_profile(0.2), cfg);
    cfg.wavelength_m *= 2.0;
    const auto bw2 = carson_bandwidth(constant_profile(0.2), cfg);
    for (std::size_t k = 0; k < bw1.values.size(); ++k)
        CHECK(bw2.values[k] == doctest::Approx(0.5 * bw1.values[k]).epsilon(1e-9));
}

TEST_CASE("max_combine basics") {
    BandwidthSeries a{0.01, 0.0, {1.0, 3.0}};
    BandwidthSeries b{0.01, 0.0, {2.0, 2.0}};
    const auto c = max_combine({a, b});
    CHECK(c.values == std::vector<double>{2.0, 3.0});

    BandwidthSeries zeros{0.01, 0.0, {0.0, 0.0}};
    const auto d = max_combine({a, zeros});
    CHECK(d.values == a.values);

    BandwidthSeries bad{0.01, 0.0, {1.0}};
    CHECK_THROWS_AS(max_combine({a, bad}), std::invalid_argument);
    BandwidthSeries bad_rate{0.02, 0.0, {1.0, 1.0}};
    CHECK_THROWS_AS(max_combine({a, bad_rate}), std::invalid_argument);
}

TEST_CASE("max_combine is commutative and associative on random triples") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 50.0);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 5 + rng() % 50;
        auto mk = [&] {
            BandwidthSeries s{0.01, 0.0, {}};
            s.values.resize(n);
            for (double& v : s.values) v = val(rng);
            return s;
        };
        const auto a = mk(), b = mk(), c = mk();
        const auto abc = max_combine({a, b, c});
        const auto cba = max_combine({c, b, a});
        const auto nested = max_combine({max_combine({a, b}), c});
        CHECK(abc.values == cba.values);
        CHECK(abc.values == nested.values);
    }
}
