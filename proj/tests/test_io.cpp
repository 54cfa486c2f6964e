#include <doctest.h>

#include <filesystem>
#include <random>

#include "crowdcount/io.hpp"
#include "crowdcount/motion_model.hpp"

using namespace crowdcount;

namespace {

std::filesystem::path tmp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "crowdcount_io_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("speed profile CSV round-trips") {
    FidgetProcessParams params;
    params.seed = 3;
    params.n_body_parts = 3;
    const auto profile = synth_fidget_profile(params, 5.0, 50.0);

    const auto path = tmp_dir() / "profile.csv";
    io::write_speed_profile(profile, path);
    const auto back = io::read_speed_profile(path);

    REQUIRE(back.channels.size() == profile.channels.size());
    CHECK(back.sample_rate == doctest::Approx(profile.sample_rate).epsilon(1e-9));
    for (std::size_t m = 0; m < profile.channels.size(); ++m)
        for (std::size_t k = 0; k < profile.length(); k += 17)
            CHECK(back.channels[m][k] == doctest::Approx(profile.channels[m][k]).epsilon(1e-9));
}

TEST_CASE("bandwidth series CSV round-trips") {
    BandwidthSeries bw;
    bw.sample_period_s = 0.01;
    bw.t0_s = 0.5;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 60.0);
    bw.values.resize(500);
    for (double& v : bw.values) v = val(rng);

    const auto path = tmp_dir() / "bw.csv";
    io::write_bandwidth_series(bw, path);
    const auto back = io::read_bandwidth_series(path);
    CHECK(back.sample_period_s == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(back.t0_s == doctest::Approx(0.5).epsilon(1e-9));
    for (std::size_t k = 0; k < bw.values.size(); k += 13)
        CHECK(back.values[k] == doctest::Approx(bw.values[k]).epsilon(1e-9));
}

TEST_CASE("landmark CSV + sidecar round-trips") {
    LandmarkTrack track;
    track.frame_rate = 30.0;
    track.interpupillary_px = 63.36;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(0.0, 640.0);
    track.joints.resize(4);
    for (auto& seq : track.joints) {
        seq.resize(60);
        for (auto& lm : seq) lm = Landmark{pos(rng), pos(rng), 0.9};
    }

    const auto csv = tmp_dir() / "landmarks.csv";
    const auto meta = tmp_dir() / "landmarks.json";
    io::write_landmarks(track, csv, meta);
    const auto back = io::read_landmarks(csv, meta);

    CHECK(back.frame_rate == doctest::Approx(30.0));
    CHECK(back.interpupillary_px == doctest::Approx(63.36));
    REQUIRE(back.joints.size() == 4);
    for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t k = 0; k < 60; k += 7) {
            CHECK(back.joints[j][k].x_px == doctest::Approx(track.joints[j][k].x_px).epsilon(1e-9));
            CHECK(back.joints[j][k].visibility == doctest::Approx(0.9));
        }
}

TEST_CASE("histogram and prior-set JSON round-trip") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    std::vector<double> counts(100);
    for (double& c : counts) c = val(rng);
    const auto base = histogram_from_counts(counts, default_bin_edges(), 1e-6);

    const auto hist_path = tmp_dir() / "hist.json";
    io::write_histogram(base, hist_path);
    const auto back = io::read_histogram(hist_path);
    REQUIRE(back.bins() == base.bins());
    for (std::size_t k = 0; k < base.bins(); ++k)
        CHECK(back.pdf[k] == doctest::Approx(base.pdf[k]).epsilon(1e-9));

    const auto set = build_prior_set(base, 6);
    const auto set_path = tmp_dir() / "priors.json";
    io::write_prior_set(set, set_path);
    const auto set_back = io::read_prior_set(set_path);
    REQUIRE(set_back.n_max == 6);
    for (int n = 1; n <= 6; ++n)
        for (std::size_t k = 0; k < base.bins(); k += 11)
            CHECK(set_back.prior(n).pdf[k] == doctest::Approx(set.prior(n).pdf[k]).epsilon(1e-9));
}

TEST_CASE("autoencoder model JSON round-trips bit-identically enough") {
    AutoencoderModel m;
    m.input_dim = 8;
    m.hidden_dim = 3;
    std::mt19937_64 rng(11);
    std::normal_distribution<double> w(0.0, 1.0);
    m.w1.resize(3, 8);
    m.w2.resize(8, 3);
    m.b1.resize(3);
    m.b2.resize(8);
    for (Eigen::Index r = 0; r < 3; ++r)
        for (Eigen::Index c = 0; c < 8; ++c) m.w1(r, c) = w(rng);
    for (Eigen::Index r = 0; r < 8; ++r)
        for (Eigen::Index c = 0; c < 3; ++c) m.w2(r, c) = w(rng);
    for (Eigen::Index r = 0; r < 3; ++r) m.b1(r) = w(rng);
    for (Eigen::Index r = 0; r < 8; ++r) m.b2(r) = w(rng);
    m.train_error_mean = 0.0123;

    const auto path = tmp_dir() / "model.json";
    io::write_model(m, path);
    const auto back = io::read_model(path);
    CHECK(back.input_dim == 8);
    CHECK(back.hidden_dim == 3);
    CHECK(back.train_error_mean == doctest::Approx(0.0123));
    CHECK((back.w1 - m.w1).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.w2 - m.w2).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.b1 - m.b1).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((back.b2 - m.b2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("mask CSV round-trips") {
    BandwidthSeries bw;
    bw.sample_period_s = 0.01;
    bw.values.assign(100, 1.0);
    AnomalyMask mask;
    mask.anomalous.assign(100, 0);
    for (std::size_t k = 20; k < 40; ++k) mask.anomalous[k] = 1;

    const auto path = tmp_dir() / "mask.csv";
    io::write_mask(mask, bw, path);
    const auto back = io::read_mask(path);
    REQUIRE(back.size() == 100);
    for (std::size_t k = 0; k < 100; ++k) CHECK(back.at(k) == mask.at(k));
}

TEST_CASE("missing files raise runtime errors") {
    CHECK_THROWS_AS(io::read_bandwidth_series(tmp_dir() / "nope.csv"), std::runtime_error);
    CHECK_THROWS_AS(io::read_model(tmp_dir() / "nope.json"), std::runtime_error);
    CHECK_THROWS_AS(io::fnv1a64_file(tmp_dir() / "nope.bin"), std::runtime_error);
}
