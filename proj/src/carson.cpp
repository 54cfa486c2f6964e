#include "crowdcount/carson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crowdcount/dsp.hpp"

namespace crowdcount {

void CarsonConfig::validate() const {
    if (!(wavelength_m > 0.0)) throw std::invalid_argument("CarsonConfig: wavelength_m must be > 0");
    if (!(psi > 0.0 && psi <= 2.0)) throw std::invalid_argument("CarsonConfig: psi must be in (0,2]");
    if (!(shift_s > 0.0 && shift_s <= window_s))
        throw std::invalid_argument("CarsonConfig: need 0 < shift_s <= window_s");
    if (!(speed_band_power_fraction > 0.0 && speed_band_power_fraction < 1.0))
        throw std::invalid_argument("CarsonConfig: speed_band_power_fraction must be in (0,1)");
}

std::vector<double> sliding_max(std::span<const double> x, std::size_t window_len) {
    return dsp::sliding_max(x, window_len);
}

namespace {

// Half-open sample range [lo, hi) of the analysis window centered at t_center.
inline void window_bounds(double t_center, double window_s, double sample_rate, std::size_t n,
                          std::size_t& lo, std::size_t& hi) {
    const auto lo_i = static_cast<std::ptrdiff_t>(std::llround((t_center - window_s / 2.0) * sample_rate));
    const auto hi_i = static_cast<std::ptrdiff_t>(std::llround((t_center + window_s / 2.0) * sample_rate));
    lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(lo_i, 0));
    hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(hi_i, static_cast<std::ptrdiff_t>(lo), static_cast<std::ptrdiff_t>(n)));
}

}  // namespace

double speed_band(const std::vector<double>& channel, double sample_rate, const CarsonConfig& config,
                  std::size_t window_index) {
    config.validate();
    if (channel.empty()) throw std::invalid_argument("speed_band: empty channel");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("speed_band: sample_rate must be > 0");

    const double t = static_cast<double>(window_index) * config.shift_s;
    std::size_t lo = 0, hi = 0;
    window_bounds(t, config.window_s, sample_rate, channel.size(), lo, hi);
    if (hi - lo < 2) return 0.0;

    const auto power = dsp::power_spectrum(std::span<const double>(channel.data() + lo, hi - lo));
    const double bin_hz = sample_rate / static_cast<double>(hi - lo);
    return dsp::power_quantile_interp_hz(power, bin_hz, config.speed_band_power_fraction);
}

BandwidthSeries carson_bandwidth(const SpeedProfile& profile, const CarsonConfig& config) {
    profile.validate();
    config.validate();

    const std::size_t n = profile.length();
    const double fs = profile.sample_rate;
    const auto window_len = static_cast<std::size_t>(std::max(1LL, std::llround(config.window_s * fs)));
    const std::size_t n_out = static_cast<std::size_t>(std::floor(profile.duration_s() / config.shift_s)) + 1;

    std::vector<std::vector<double>> vmax;
    vmax.reserve(profile.channels.size());
    for (const auto& ch : profile.channels) vmax.push_back(dsp::sliding_max(ch, window_len));

    BandwidthSeries out;
    out.sample_period_s = config.shift_s;
    out.t0_s = 0.0;
    out.values.resize(n_out, 0.0);

    // consecutive window positions often map to the same sample range when
    // shift_s * fs < 1; reuse the previous f0 in that case
    std::size_t prev_lo = n + 1, prev_hi = n + 1;
    std::vector<double> f0_cache(profile.channels.size(), 0.0);

    for (std::size_t k = 0; k < n_out; ++k) {
        const double t = static_cast<double>(k) * config.shift_s;
        const auto center = static_cast<std::size_t>(
            std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(std::llround(t * fs)), 0,
                                       static_cast<std::ptrdiff_t>(n) - 1));
        std::size_t lo = 0, hi = 0;
        window_bounds(t, config.window_s, fs, n, lo, hi);

        if (lo != prev_lo || hi != prev_hi) {
            for (std::size_t m = 0; m < profile.channels.size(); ++m) {
                double f0 = 0.0;
                if (hi - lo >= 2) {
                    const auto power =
                        dsp::power_spectrum(std::span<const double>(profile.channels[m].data() + lo, hi - lo));
                    const double bin_hz = fs / static_cast<double>(hi - lo);
                    f0 = dsp::power_quantile_interp_hz(power, bin_hz, config.speed_band_power_fraction);
                }
                f0_cache[m] = f0;
            }
            prev_lo = lo;
            prev_hi = hi;
        }

        double best = 0.0;
        for (std::size_t m = 0; m < profile.channels.size(); ++m)
            best = std::max(best, vmax[m][center] * config.psi / config.wavelength_m + f0_cache[m]);
        out.values[k] = best;
    }
    return out;
}

BandwidthSeries max_combine(const std::vector<BandwidthSeries>& series) {
    if (series.empty()) throw std::invalid_argument("max_combine: no series");
    const auto& first = series.front();
    for (const auto& s : series) {
        if (s.values.size() != first.values.size())
            throw std::invalid_argument("max_combine: series lengths differ");
        if (std::abs(s.sample_period_s - first.sample_period_s) > 1e-12)
            throw std::invalid_argument("max_combine: sample periods differ");
    }
    BandwidthSeries out = first;
    for (std::size_t i = 1; i < series.size(); ++i)
        for (std::size_t k = 0; k < out.values.size(); ++k)
            out.values[k] = std::max(out.values[k], series[i].values[k]);
    return out;
}

}  // namespace crowdcount
