#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdcount {

// Per-body-part speed magnitudes (m/s) of one individual, equal-length channels.
struct SpeedProfile {
    double sample_rate = 0.0;                     // samples per second
    std::vector<std::vector<double>> channels;    // channels[m][k], m/s

    std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
    double duration_s() const { return sample_rate > 0 ? static_cast<double>(length()) / sample_rate : 0.0; }

    void validate() const {
        if (!(sample_rate > 0.0))
            throw std::invalid_argument("SpeedProfile: sample_rate must be > 0");
        if (channels.empty())
            throw std::invalid_argument("SpeedProfile: no channels");
        const std::size_t n = channels.front().size();
        for (const auto& ch : channels) {
            if (ch.size() != n)
                throw std::invalid_argument("SpeedProfile: channels have unequal lengths");
            for (double v : ch)
                if (!(v >= 0.0) || !std::isfinite(v))
                    throw std::invalid_argument("SpeedProfile: speeds must be finite and >= 0");
        }
    }
};

// Instantaneous signal bandwidth (Hz) sampled every sample_period_s seconds.
struct BandwidthSeries {
    double sample_period_s = 0.0;
    double t0_s = 0.0;            // time of first sample
    std::vector<double> values;   // Hz

    double time_at(std::size_t k) const { return t0_s + static_cast<double>(k) * sample_period_s; }
    double duration_s() const { return static_cast<double>(values.size()) * sample_period_s; }

    void validate() const {
        if (!(sample_period_s > 0.0))
            throw std::invalid_argument("BandwidthSeries: sample_period_s must be > 0");
        for (double v : values)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw std::invalid_argument("BandwidthSeries: values must be finite and >= 0");
    }
};

// Per-sample exclusion flags aligned to a BandwidthSeries (true = anomalous).
struct AnomalyMask {
    std::vector<char> anomalous;

    std::size_t size() const { return anomalous.size(); }
    bool at(std::size_t k) const { return anomalous[k] != 0; }
    std::size_t flagged_count() const {
        std::size_t c = 0;
        for (char f : anomalous) c += (f != 0);
        return c;
    }
    double flag_rate() const {
        return anomalous.empty() ? 0.0 : static_cast<double>(flagged_count()) / static_cast<double>(anomalous.size());
    }
};

// Splits one root seed into independent stream seeds, FNV-1a over (root, tag, index).
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view tag, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    };
    mix(root);
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    mix(index);
    return h;
}

}  // namespace crowdcount
