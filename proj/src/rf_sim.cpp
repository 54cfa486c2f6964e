#include "crowdcount/rf_sim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "crowdcount/dsp.hpp"

namespace crowdcount {

void BasebandTrace::validate() const {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("BasebandTrace: sample_rate must be > 0");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("BasebandTrace: non-finite sample");
}

namespace {

std::vector<double> resample_linear(const std::vector<double>& x, double rate_in, double rate_out,
                                    std::size_t n_out) {
    std::vector<double> out(n_out);
    if (x.empty()) return out;
    for (std::size_t k = 0; k < n_out; ++k) {
        const double pos = static_cast<double>(k) * rate_in / rate_out;
        const auto i0 = static_cast<std::size_t>(std::min<double>(std::floor(pos), static_cast<double>(x.size() - 1)));
        const std::size_t i1 = std::min(i0 + 1, x.size() - 1);
        const double frac = pos - static_cast<double>(i0);
        out[k] = x[i0] + (x[i1] - x[i0]) * std::clamp(frac, 0.0, 1.0);
    }
    return out;
}

}  // namespace

BasebandTrace synth_power_signal(const SpeedProfile& profile, const std::vector<ReflectorPath>& paths,
                                 double wavelength_m, double sample_rate, double noise_std, std::uint64_t seed) {
    profile.validate();
    if (!(wavelength_m > 0.0)) throw std::invalid_argument("synth_power_signal: wavelength_m must be > 0");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("synth_power_signal: sample_rate must be > 0");
    if (noise_std < 0.0) throw std::invalid_argument("synth_power_signal: noise_std must be >= 0");
    for (const auto& p : paths) {
        if (p.speed_channel_index >= profile.channels.size())
            throw std::invalid_argument("synth_power_signal: speed_channel_index out of range");
        if (!(p.amplitude >= 0.0) || !std::isfinite(p.initial_phase))
            throw std::invalid_argument("synth_power_signal: invalid path");
    }

    const auto n = static_cast<std::size_t>(std::llround(profile.duration_s() * sample_rate));
    BasebandTrace trace;
    trace.sample_rate = sample_rate;
    trace.values.assign(n, 0.0);

    // one phase integral per distinct speed channel
    std::vector<std::vector<double>> integrals(profile.channels.size());
    for (const auto& p : paths) {
        auto& integ = integrals[p.speed_channel_index];
        if (!integ.empty()) continue;
        const auto v = resample_linear(profile.channels[p.speed_channel_index], profile.sample_rate, sample_rate, n);
        integ.resize(n, 0.0);
        const double dt = 1.0 / sample_rate;
        for (std::size_t k = 1; k < n; ++k) integ[k] = integ[k - 1] + 0.5 * (v[k] + v[k - 1]) * dt;
    }

    for (const auto& p : paths) {
        const auto& integ = integrals[p.speed_channel_index];
        const double scale = 2.0 * std::numbers::pi * p.psi / wavelength_m;
        for (std::size_t k = 0; k < n; ++k)
            trace.values[k] += p.amplitude * std::cos(scale * integ[k] + p.initial_phase);
    }

    if (noise_std > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> noise(0.0, noise_std);
        for (double& v : trace.values) v += noise(rng);
    }
    return trace;
}

Spectrogram spectrogram(const BasebandTrace& trace, double window_s, double shift_s) {
    trace.validate();
    const auto window_len = static_cast<std::size_t>(std::llround(window_s * trace.sample_rate));
    const auto shift_len = static_cast<std::size_t>(std::max(1LL, std::llround(shift_s * trace.sample_rate)));
    if (window_len < 2 || trace.values.size() < window_len)
        throw std::invalid_argument("spectrogram: trace shorter than one window");

    const std::size_t n_windows = (trace.values.size() - window_len) / shift_len + 1;
    const std::size_t n_bins = window_len / 2 + 1;

    Spectrogram spec;
    spec.times.resize(n_windows);
    spec.freqs.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
        spec.freqs[k] = static_cast<double>(k) * trace.sample_rate / static_cast<double>(window_len);
    spec.power.resize(n_windows);

    for (std::size_t j = 0; j < n_windows; ++j) {
        const std::size_t start = j * shift_len;
        spec.times[j] = (static_cast<double>(start) + static_cast<double>(window_len) / 2.0) / trace.sample_rate;
        spec.power[j] = dsp::power_spectrum(std::span<const double>(trace.values.data() + start, window_len));
    }
    return spec;
}

Spectrogram pca_average_spectrogram(const std::vector<BasebandTrace>& traces, int n_components, double window_s,
                                    double shift_s) {
    if (n_components < 1) throw std::invalid_argument("pca_average_spectrogram: n_components must be >= 1");
    if (traces.size() < static_cast<std::size_t>(n_components))
        throw std::invalid_argument("pca_average_spectrogram: fewer traces than components");
    const std::size_t n = traces.front().values.size();
    const double rate = traces.front().sample_rate;
    for (const auto& t : traces) {
        t.validate();
        if (t.values.size() != n) throw std::invalid_argument("pca_average_spectrogram: trace lengths differ");
        if (std::abs(t.sample_rate - rate) > 1e-12)
            throw std::invalid_argument("pca_average_spectrogram: sample rates differ");
    }

    const auto d = static_cast<Eigen::Index>(traces.size());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), d);
    for (Eigen::Index c = 0; c < d; ++c)
        for (std::size_t k = 0; k < n; ++k) x(static_cast<Eigen::Index>(k), c) = traces[static_cast<std::size_t>(c)].values[k];
    x.rowwise() -= x.colwise().mean();

    const Eigen::MatrixXd cov = x.transpose() * x / static_cast<double>(n > 1 ? n - 1 : 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("pca_average_spectrogram: eigensolver failed");

    Spectrogram avg;
    for (int c = 0; c < n_components; ++c) {
        // eigenvalues ascend; take the c-th largest
        const Eigen::VectorXd v = eig.eigenvectors().col(d - 1 - c);
        const Eigen::VectorXd score = x * v;
        BasebandTrace comp;
        comp.sample_rate = rate;
        comp.values.assign(score.data(), score.data() + score.size());
        const Spectrogram s = spectrogram(comp, window_s, shift_s);
        if (c == 0) {
            avg = s;
        } else {
            for (std::size_t j = 0; j < avg.power.size(); ++j)
                for (std::size_t k = 0; k < avg.power[j].size(); ++k) avg.power[j][k] += s.power[j][k];
        }
    }
    const double inv = 1.0 / static_cast<double>(n_components);
    for (auto& row : avg.power)
        for (double& p : row) p *= inv;
    return avg;
}

BandwidthSeries extract_bandwidth(const Spectrogram& spec, double power_fraction) {
    if (!(power_fraction > 0.0 && power_fraction < 1.0))
        throw std::invalid_argument("extract_bandwidth: power_fraction must be in (0,1)");
    if (spec.times.empty() || spec.freqs.size() < 2)
        throw std::invalid_argument("extract_bandwidth: empty spectrogram");

    const double bin_hz = spec.freqs[1] - spec.freqs[0];
    BandwidthSeries out;
    out.sample_period_s = spec.times.size() > 1 ? spec.times[1] - spec.times[0] : bin_hz;
    out.t0_s = spec.times.front();
    out.values.resize(spec.times.size());
    for (std::size_t j = 0; j < spec.times.size(); ++j)
        out.values[j] = dsp::power_quantile_bin_hz(spec.power[j], bin_hz, power_fraction);
    return out;
}

std::vector<BasebandTrace> synth_power_streams(const SpeedProfile& profile, int n_streams, double wavelength_m,
                                               double sample_rate, double noise_std, double psi, double amp_lo,
                                               double amp_hi, std::uint64_t seed) {
    if (n_streams < 1) throw std::invalid_argument("synth_power_streams: n_streams must be >= 1");
    if (!(amp_lo >= 0.0) || amp_lo > amp_hi)
        throw std::invalid_argument("synth_power_streams: need 0 <= amp_lo <= amp_hi");

    std::vector<BasebandTrace> streams;
    streams.reserve(static_cast<std::size_t>(n_streams));
    for (int s = 0; s < n_streams; ++s) {
        std::mt19937_64 rng(derive_seed(seed, "stream-paths", static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> amp(amp_lo, amp_hi);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        std::vector<ReflectorPath> paths(profile.channels.size());
        for (std::size_t m = 0; m < paths.size(); ++m) {
            paths[m].amplitude = amp(rng);
            paths[m].initial_phase = phase(rng);
            paths[m].psi = psi;
            paths[m].speed_channel_index = m;
        }
        streams.push_back(synth_power_signal(profile, paths, wavelength_m, sample_rate, noise_std,
                                             derive_seed(seed, "stream-noise", static_cast<std::uint64_t>(s))));
    }
    return streams;
}

}  // namespace crowdcount
