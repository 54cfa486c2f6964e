#include "crowdcount/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace crowdcount::dsp {

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k)
        w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n)));
    return w;
}

namespace {

// FFTW plans are cached per transform length. Plan creation and execution are
// serialized; transforms themselves run on per-call buffers.
struct FftwCache {
    std::mutex mtx;
    std::map<std::size_t, fftw_plan> plans;

    fftw_plan get(std::size_t n, double* in, fftw_complex* out) {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = plans.find(n);
        if (it == plans.end()) {
            fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
            it = plans.emplace(n, p).first;
        }
        return it->second;
    }
};

FftwCache& cache() {
    static FftwCache c;
    return c;
}

struct FftwBuffer {
    double* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t n = 0;

    explicit FftwBuffer(std::size_t len) : n(len) {
        in = static_cast<double*>(fftw_malloc(sizeof(double) * n));
        out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
        if (!in || !out) throw std::bad_alloc();
    }
    ~FftwBuffer() {
        fftw_free(in);
        fftw_free(out);
    }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

std::vector<double> power_spectrum(std::span<const double> segment) {
    const std::size_t n = segment.size();
    if (n < 2) throw std::invalid_argument("power_spectrum: segment too short");

    double mean = 0.0;
    double energy = 0.0;
    for (double v : segment) {
        mean += v;
        energy += v * v;
    }
    mean /= static_cast<double>(n);

    double residual = 0.0;
    for (double v : segment) residual += (v - mean) * (v - mean);
    // numerically constant segments carry no spectral content; the residual of
    // an exact constant is pure rounding noise
    if (residual <= 1e-24 * energy) return std::vector<double>(n / 2 + 1, 0.0);

    FftwBuffer buf(n);
    const std::vector<double> w = hann_window(n);
    for (std::size_t k = 0; k < n; ++k) buf.in[k] = (segment[k] - mean) * w[k];

    fftw_plan plan = cache().get(n, buf.in, buf.out);
    fftw_execute_dft_r2c(plan, buf.in, buf.out);

    const std::size_t nbins = n / 2 + 1;
    std::vector<double> power(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        const double re = buf.out[k][0];
        const double im = buf.out[k][1];
        power[k] = re * re + im * im;
    }
    // fold the two-sided spectrum: interior bins appear twice
    const bool even = (n % 2 == 0);
    for (std::size_t k = 1; k + 1 < nbins; ++k) power[k] *= 2.0;
    if (!even && nbins > 1) power[nbins - 1] *= 2.0;
    return power;
}

double power_quantile_bin_hz(const std::vector<double>& power, double bin_hz, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("power_quantile: fraction must be in (0,1)");
    double total = 0.0;
    for (double p : power) total += p;
    if (!(total > 0.0)) return 0.0;
    const double target = fraction * total;
    double cum = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
        cum += power[k];
        if (cum >= target) return static_cast<double>(k) * bin_hz;
    }
    return static_cast<double>(power.size() - 1) * bin_hz;
}

double power_quantile_interp_hz(const std::vector<double>& power, double bin_hz, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("power_quantile: fraction must be in (0,1)");
    double total = 0.0;
    for (double p : power) total += p;
    if (!(total > 0.0)) return 0.0;
    const double target = fraction * total;
    double cum = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
        const double below = cum;
        cum += power[k];
        if (cum >= target) {
            if (k == 0) return 0.0;
            const double frac_in_bin = power[k] > 0.0 ? (target - below) / power[k] : 0.0;
            return (static_cast<double>(k - 1) + frac_in_bin) * bin_hz;
        }
    }
    return static_cast<double>(power.size() - 1) * bin_hz;
}

std::vector<double> sliding_max(std::span<const double> x, std::size_t window_len) {
    if (x.empty()) throw std::invalid_argument("sliding_max: empty input");
    if (window_len < 1) throw std::invalid_argument("sliding_max: window_len must be >= 1");

    const std::size_t n = x.size();
    const std::size_t half_lo = (window_len - 1) / 2;
    const std::size_t half_hi = window_len / 2;
    std::vector<double> out(n);

    // monotonic deque over the advancing right edge
    std::deque<std::size_t> dq;
    std::size_t right = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t hi = std::min(n - 1, k + half_hi);
        const std::size_t lo = k >= half_lo ? k - half_lo : 0;
        while (right <= hi) {
            while (!dq.empty() && x[dq.back()] <= x[right]) dq.pop_back();
            dq.push_back(right);
            ++right;
        }
        while (!dq.empty() && dq.front() < lo) dq.pop_front();
        out[k] = x[dq.front()];
    }
    return out;
}

std::vector<double> lowpass_zero_phase(std::span<const double> x, double cutoff_hz, double sample_rate) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("lowpass: sample_rate must be > 0");
    if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate / 2.0)
        throw std::invalid_argument("lowpass: cutoff must satisfy 0 < cutoff < sample_rate/2");

    // bilinear-transform Butterworth biquad
    const double wc = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
    const double k1 = std::numbers::sqrt2 * wc;
    const double k2 = wc * wc;
    const double a0 = 1.0 + k1 + k2;
    const double b0 = k2 / a0;
    const double b1 = 2.0 * k2 / a0;
    const double b2 = k2 / a0;
    const double a1 = 2.0 * (k2 - 1.0) / a0;
    const double a2 = (1.0 - k1 + k2) / a0;

    auto pass = [&](const std::vector<double>& in) {
        std::vector<double> out(in.size());
        double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
        if (!in.empty()) {
            // prime state with the first sample to avoid a step transient
            x1 = x2 = in.front();
            y1 = y2 = in.front();
        }
        for (std::size_t k = 0; k < in.size(); ++k) {
            const double y = b0 * in[k] + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
            x2 = x1;
            x1 = in[k];
            y2 = y1;
            y1 = y;
            out[k] = y;
        }
        return out;
    };

    std::vector<double> fwd = pass(std::vector<double>(x.begin(), x.end()));
    std::reverse(fwd.begin(), fwd.end());
    std::vector<double> bwd = pass(fwd);
    std::reverse(bwd.begin(), bwd.end());
    return bwd;
}

}  // namespace crowdcount::dsp
