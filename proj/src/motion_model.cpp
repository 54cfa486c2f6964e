#include "crowdcount/motion_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "crowdcount/dsp.hpp"

namespace crowdcount {

void LandmarkTrack::validate() const {
    if (!(frame_rate > 0.0)) throw std::invalid_argument("LandmarkTrack: frame_rate must be > 0");
    if (!(interpupillary_px > 0.0)) throw std::invalid_argument("LandmarkTrack: interpupillary_px must be > 0");
    if (joints.empty()) throw std::invalid_argument("LandmarkTrack: no joints");
    const std::size_t n = joints.front().size();
    if (n < 2) throw std::invalid_argument("LandmarkTrack: needs at least 2 frames");
    for (const auto& seq : joints) {
        if (seq.size() != n) throw std::invalid_argument("LandmarkTrack: joint sequences have unequal lengths");
        for (const auto& lm : seq) {
            if (!std::isfinite(lm.x_px) || !std::isfinite(lm.y_px))
                throw std::invalid_argument("LandmarkTrack: non-finite position");
            if (!(lm.visibility >= 0.0 && lm.visibility <= 1.0))
                throw std::invalid_argument("LandmarkTrack: visibility outside [0,1]");
        }
    }
}

void FidgetProcessParams::validate() const {
    if (!(silent_mean_s > 0.0) || !(fidget_mean_s > 0.0))
        throw std::invalid_argument("FidgetProcessParams: durations must be > 0");
    if (!(peak_speed_lo >= 0.0) || peak_speed_lo > peak_speed_hi)
        throw std::invalid_argument("FidgetProcessParams: need 0 <= peak_speed_lo <= peak_speed_hi");
    if (n_body_parts < 1) throw std::invalid_argument("FidgetProcessParams: n_body_parts must be >= 1");
    if (!(envelope_smoothness_hz > 0.0))
        throw std::invalid_argument("FidgetProcessParams: envelope_smoothness_hz must be > 0");
}

double pixel_scale_factor(double d_ip_px) {
    if (!(d_ip_px > 0.0) || !std::isfinite(d_ip_px))
        throw std::invalid_argument("pixel_scale_factor: d_ip_px must be finite and > 0");
    return 0.06336 / d_ip_px;
}

SpeedProfile landmarks_to_speeds(const LandmarkTrack& track, double lowpass_cutoff_hz, double visibility_floor) {
    track.validate();
    if (!(lowpass_cutoff_hz > 0.0) || lowpass_cutoff_hz >= track.frame_rate / 2.0)
        throw std::invalid_argument("landmarks_to_speeds: cutoff must satisfy 0 < cutoff < frame_rate/2");

    const double scale = pixel_scale_factor(track.interpupillary_px);
    const std::size_t n = track.joints.front().size();

    SpeedProfile profile;
    profile.sample_rate = track.frame_rate;
    profile.channels.reserve(track.joints.size());

    for (const auto& seq : track.joints) {
        std::vector<double> speed(n, 0.0);
        for (std::size_t k = 1; k < n; ++k) {
            if (seq[k].visibility < visibility_floor || seq[k - 1].visibility < visibility_floor)
                continue;  // occluded joints contribute zero speed
            const double dx = seq[k].x_px - seq[k - 1].x_px;
            const double dy = seq[k].y_px - seq[k - 1].y_px;
            speed[k] = std::hypot(dx, dy) * track.frame_rate * scale;
        }
        speed = dsp::lowpass_zero_phase(speed, lowpass_cutoff_hz, track.frame_rate);
        for (double& v : speed) v = std::max(0.0, v);  // filter undershoot
        profile.channels.push_back(std::move(speed));
    }
    return profile;
}

SpeedProfile synth_fidget_profile(const FidgetProcessParams& params, double duration_s, double sample_rate) {
    params.validate();
    if (!(duration_s > 0.0)) throw std::invalid_argument("synth_fidget_profile: duration_s must be > 0");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("synth_fidget_profile: sample_rate must be > 0");

    const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    const double min_burst_s = 1.0 / params.envelope_smoothness_hz;

    SpeedProfile profile;
    profile.sample_rate = sample_rate;
    profile.channels.assign(static_cast<std::size_t>(params.n_body_parts), std::vector<double>(n, 0.0));

    for (int m = 0; m < params.n_body_parts; ++m) {
        std::mt19937_64 rng(derive_seed(params.seed, "fidget-channel", static_cast<std::uint64_t>(m)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        auto& ch = profile.channels[static_cast<std::size_t>(m)];

        double t = -params.silent_mean_s * std::log1p(-unit(rng));
        while (t < duration_s) {
            double burst = -params.fidget_mean_s * std::log1p(-unit(rng));
            burst = std::max(burst, min_burst_s);
            const double peak = params.peak_speed_lo + (params.peak_speed_hi - params.peak_speed_lo) * unit(rng);

            const auto i0 = static_cast<std::ptrdiff_t>(std::llround(t * sample_rate));
            const auto i1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n),
                                                     static_cast<std::ptrdiff_t>(std::llround((t + burst) * sample_rate)));
            if (i1 <= i0) {
                t += burst - params.silent_mean_s * std::log1p(-unit(rng));
                continue;
            }
            for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(i0, 0); i < i1; ++i) {
                const double u = (static_cast<double>(i - i0) + 0.5) / static_cast<double>(i1 - i0);
                const double env = peak * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
                ch[static_cast<std::size_t>(i)] = std::max(ch[static_cast<std::size_t>(i)], env);
            }
            t += burst - params.silent_mean_s * std::log1p(-unit(rng));
        }
    }
    return profile;
}

}  // namespace crowdcount
