#pragma once

#include <span>
#include <vector>

#include "crowdcount/types.hpp"

namespace crowdcount {

// Speed-to-bandwidth conversion settings. wavelength_m defaults to a 5.32 GHz
// carrier; psi is the far-transceiver geometric factor 2*cos(phi) ~ 2.
struct CarsonConfig {
    double wavelength_m = 0.0564;
    double psi = 2.0;
    double window_s = 1.0;
    double shift_s = 0.01;
    double speed_band_power_fraction = 0.95;

    void validate() const;
};

// Max over the centered window (truncated at the edges); output length equals input length.
std::vector<double> sliding_max(std::span<const double> x, std::size_t window_len);

// Bandwidth of one speed channel over the window centered at index
// window_index * shift_s: the frequency below which speed_band_power_fraction
// of the mean-removed windowed spectral power lies (interpolated between bins).
double speed_band(const std::vector<double>& channel, double sample_rate, const CarsonConfig& config,
                  std::size_t window_index);

// Predicted received-signal bandwidth series:
//   BW(t) = max_m( v_max_m(t) * psi / wavelength + f0_m(t) )
// with window centers at t = k * shift_s spanning the profile's full duration.
BandwidthSeries carson_bandwidth(const SpeedProfile& profile, const CarsonConfig& config);

// Pointwise maximum of equally sampled, equal-length series.
BandwidthSeries max_combine(const std::vector<BandwidthSeries>& series);

}  // namespace crowdcount
