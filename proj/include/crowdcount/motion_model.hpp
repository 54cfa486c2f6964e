#pragma once

#include <cstdint>
#include <vector>

#include "crowdcount/types.hpp"

namespace crowdcount {

struct Landmark {
    double x_px = 0.0;
    double y_px = 0.0;
    double visibility = 1.0;
};

// Pose-landmark trajectories for one video of a seated individual.
struct LandmarkTrack {
    double frame_rate = 0.0;         // frames per second
    double interpupillary_px = 0.0;  // d_ip, pixels
    std::vector<std::vector<Landmark>> joints;  // joints[j][frame]

    void validate() const;
};

// Alternating silent/fidget renewal process driving synthetic speed profiles.
struct FidgetProcessParams {
    double silent_mean_s = 8.0;          // mean silent-gap duration
    double fidget_mean_s = 2.25;         // mean fidget-burst duration
    double peak_speed_lo = 0.05;         // m/s, burst peak drawn uniformly
    double peak_speed_hi = 0.5;          // m/s
    int n_body_parts = 5;
    double envelope_smoothness_hz = 6.0; // bounds envelope bandwidth (min burst duration = 1/cutoff)
    std::uint64_t seed = 1;

    void validate() const;
};

// Pixel-to-meter conversion from the interpupillary reference (63.36 mm adult average).
double pixel_scale_factor(double d_ip_px);

// Frame-differenced joint speeds in m/s, low-pass filtered, one channel per
// joint. Landmarks with visibility below visibility_floor contribute zero speed.
SpeedProfile landmarks_to_speeds(const LandmarkTrack& track, double lowpass_cutoff_hz = 6.0,
                                 double visibility_floor = 0.5);

// Synthetic seated-fidget speed profile: exponential silent gaps, raised-cosine
// bursts with uniform peaks. Deterministic under params.seed.
SpeedProfile synth_fidget_profile(const FidgetProcessParams& params, double duration_s, double sample_rate);

}  // namespace crowdcount
