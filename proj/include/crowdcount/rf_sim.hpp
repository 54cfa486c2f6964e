#pragma once

#include <cstdint>
#include <vector>

#include "crowdcount/types.hpp"

namespace crowdcount {

// One motion-modulated reflection path of the received power model.
struct ReflectorPath {
    double amplitude = 1.0;        // A_m
    double initial_phase = 0.0;    // delta-mu_m, rad
    double psi = 2.0;              // geometric factor
    std::size_t speed_channel_index = 0;
};

// Real received power-signal samples.
struct BasebandTrace {
    double sample_rate = 200.0;
    std::vector<double> values;

    void validate() const;
};

// Short-time spectral power: |times| x |freqs| nonnegative matrix.
struct Spectrogram {
    std::vector<double> times;                 // window centers, s
    std::vector<double> freqs;                 // bin centers, 0..sample_rate/2 Hz
    std::vector<std::vector<double>> power;    // power[t][f]
};

// Sum of per-path cosines with phase 2*pi*psi/lambda * integral of the driving
// speed channel, plus white Gaussian noise. Speeds are resampled to
// sample_rate by linear interpolation; the integral is cumulative trapezoidal.
BasebandTrace synth_power_signal(const SpeedProfile& profile, const std::vector<ReflectorPath>& paths,
                                 double wavelength_m, double sample_rate, double noise_std, std::uint64_t seed);

// Hann-tapered short-time power spectra of the per-window mean-removed trace.
Spectrogram spectrogram(const BasebandTrace& trace, double window_s = 1.0, double shift_s = 0.01);

// PCA across traces (samples as observations, traces as variables); averages
// the spectrograms of the first n_components principal-component series.
Spectrogram pca_average_spectrogram(const std::vector<BasebandTrace>& traces, int n_components = 5,
                                    double window_s = 1.0, double shift_s = 0.01);

// Per time step, the smallest bin center below which power_fraction of the
// window's total spectral power lies; zero-power windows yield 0 Hz.
BandwidthSeries extract_bandwidth(const Spectrogram& spec, double power_fraction = 0.95);

// Independent Eq.-style realizations sharing the same speed channels: one path
// per speed channel per stream, amplitudes uniform in [amp_lo, amp_hi], phases
// uniform in [0, 2*pi). Models multiple phase-difference streams.
std::vector<BasebandTrace> synth_power_streams(const SpeedProfile& profile, int n_streams, double wavelength_m,
                                               double sample_rate, double noise_std, double psi, double amp_lo,
                                               double amp_hi, std::uint64_t seed);

}  // namespace crowdcount
