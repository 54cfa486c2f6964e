#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "crowdcount/motion_model.hpp"

using namespace crowdcount;

TEST_CASE("pixel_scale_factor worked values") {
    CHECK(pixel_scale_factor(63.36) == doctest::Approx(0.001).epsilon(1e-12));
    CHECK(pixel_scale_factor(126.72) == doctest::Approx(0.0005).epsilon(1e-12));
    CHECK(pixel_scale_factor(31.68) == doctest::Approx(0.002).epsilon(1e-12));
    CHECK_THROWS_AS(pixel_scale_factor(0.0), std::invalid_argument);
    CHECK_THROWS_AS(pixel_scale_factor(-10.0), std::invalid_argument);
    CHECK_THROWS_AS(pixel_scale_factor(std::nan("")), std::invalid_argument);
}

namespace {

LandmarkTrack linear_track(double px_per_frame, std::size_t frames, double fps = 30.0, double d_ip = 63.36) {
    LandmarkTrack track;
    track.frame_rate = fps;
    track.interpupillary_px = d_ip;
    std::vector<Landmark> seq(frames);
    for (std::size_t k = 0; k < frames; ++k) seq[k] = Landmark{px_per_frame * static_cast<double>(k), 0.0, 1.0};
    track.joints.push_back(seq);
    return track;
}

}  // namespace

TEST_CASE("stationary joint produces an all-zero speed channel") {
    const auto track = linear_track(0.0, 90);
    const auto profile = landmarks_to_speeds(track);
    for (double v : profile.channels.front()) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("1 px/frame at 30 fps with d_ip 63.36 px gives 0.03 m/s") {
    const auto track = linear_track(1.0, 300);
    const auto profile = landmarks_to_speeds(track, 6.0);
    // steady-state interior samples (away from the differencing start and edges)
    CHECK(profile.sample_rate == doctest::Approx(30.0));
    CHECK(profile.channels.front()[150] == doctest::Approx(0.03).epsilon(1e-3));
}

TEST_CASE("single-frame spike is attenuated versus unfiltered differencing") {
    LandmarkTrack track = linear_track(0.0, 200);
    track.joints[0][100].x_px = 40.0;  // one-frame excursion
    const auto profile = landmarks_to_speeds(track, 3.0);

    // unfiltered oracle: plain frame differencing
    const double scale = pixel_scale_factor(track.interpupillary_px);
    double raw_peak = 0.0;
    for (std::size_t k = 1; k < 200; ++k) {
        const double dx = track.joints[0][k].x_px - track.joints[0][k - 1].x_px;
        raw_peak = std::max(raw_peak, std::abs(dx) * track.frame_rate * scale);
    }
    double filtered_peak = 0.0;
    for (double v : profile.channels.front()) filtered_peak = std::max(filtered_peak, v);
    CHECK(filtered_peak < raw_peak);
    CHECK(filtered_peak > 0.0);
}

TEST_CASE("low-visibility landmarks contribute zero speed") {
    LandmarkTrack track = linear_track(2.0, 100);
    for (std::size_t k = 40; k < 60; ++k) track.joints[0][k].visibility = 0.1;
    const auto profile = landmarks_to_speeds(track, 6.0);
    // mid-occlusion samples are zero before filtering; after smoothing they stay well below the moving speed
    CHECK(profile.channels.front()[50] < 0.5 * profile.channels.front()[20]);
}

TEST_CASE("speeds are invariant under global translation") {
    LandmarkTrack a = linear_track(1.5, 120);
    LandmarkTrack b = a;
    for (auto& lm : b.joints[0]) {
        lm.x_px += 500.0;
        lm.y_px += -230.0;
    }
    const auto pa = landmarks_to_speeds(a);
    const auto pb = landmarks_to_speeds(b);
    for (std::size_t k = 0; k < pa.length(); ++k)
        CHECK(pa.channels[0][k] == doctest::Approx(pb.channels[0][k]).epsilon(1e-12));
}

TEST_CASE("scaling pixels and d_ip together cancels out") {
    LandmarkTrack a = linear_track(1.5, 120);
    LandmarkTrack b = a;
    for (auto& lm : b.joints[0]) {
        lm.x_px *= 3.0;
        lm.y_px *= 3.0;
    }
    b.interpupillary_px *= 3.0;
    const auto pa = landmarks_to_speeds(a);
    const auto pb = landmarks_to_speeds(b);
    for (std::size_t k = 0; k < pa.length(); ++k)
        CHECK(pa.channels[0][k] == doctest::Approx(pb.channels[0][k]).epsilon(1e-10));
}

TEST_CASE("landmarks_to_speeds rejects bad inputs") {
    LandmarkTrack track = linear_track(1.0, 2);
    track.joints[0].resize(1);
    CHECK_THROWS_AS(landmarks_to_speeds(track), std::invalid_argument);

    auto ok = linear_track(1.0, 50);
    CHECK_THROWS_AS(landmarks_to_speeds(ok, 15.0), std::invalid_argument);  // >= Nyquist
}

TEST_CASE("synth_fidget_profile determinism and degenerate peak range") {
    FidgetProcessParams params;
    params.seed = 42;
    const auto a = synth_fidget_profile(params, 30.0, 50.0);
    const auto b = synth_fidget_profile(params, 30.0, 50.0);
    REQUIRE(a.channels.size() == b.channels.size());
    for (std::size_t m = 0; m < a.channels.size(); ++m)
        CHECK(a.channels[m] == b.channels[m]);

    params.peak_speed_lo = params.peak_speed_hi = 0.0;
    const auto zero = synth_fidget_profile(params, 30.0, 50.0);
    for (const auto& ch : zero.channels)
        for (double v : ch) CHECK(v == 0.0);
}

TEST_CASE("fidget duty cycle approaches fidget/(fidget+silent)") {
    FidgetProcessParams params;
    params.fidget_mean_s = 1.0;
    params.silent_mean_s = 9.0;
    params.n_body_parts = 1;
    params.seed = 7;
    const auto profile = synth_fidget_profile(params, 3600.0, 50.0);

    std::size_t active = 0;
    for (double v : profile.channels[0]) active += (v > 0.0);
    const double duty = static_cast<double>(active) / static_cast<double>(profile.length());
    CHECK(duty == doctest::Approx(0.1).epsilon(0.2));  // 0.1 +/- 0.02
}
