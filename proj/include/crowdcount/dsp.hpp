#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace crowdcount::dsp {

// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

// One-sided power spectrum of a mean-removed, Hann-windowed segment.
// Returns n/2+1 bins at spacing sample_rate/n Hz; interior bins carry the
// doubled (two-sided) power.
std::vector<double> power_spectrum(std::span<const double> segment);

// Smallest bin center f such that cumulative power up to f reaches
// fraction * total. Zero total power yields 0.
double power_quantile_bin_hz(const std::vector<double>& power, double bin_hz, double fraction);

// Same quantile with linear interpolation between bin centers (sub-bin
// resolution). Zero total power yields 0.
double power_quantile_interp_hz(const std::vector<double>& power, double bin_hz, double fraction);

// Max over the length-window_len window centered at each index, truncated at
// the edges. Output length equals input length. window_len >= 1, x nonempty.
std::vector<double> sliding_max(std::span<const double> x, std::size_t window_len);

// Zero-phase (forward-backward) second-order Butterworth low-pass.
// 0 < cutoff_hz < sample_rate/2.
std::vector<double> lowpass_zero_phase(std::span<const double> x, double cutoff_hz, double sample_rate);

}  // namespace crowdcount::dsp
