#pragma once

#include <span>
#include <vector>

#include "crowdcount/types.hpp"

namespace crowdcount {

// Discretized bandwidth PDF/CDF over a fixed bin grid. Every bin holds at
// least epsilon_floor mass after smoothing so log-ratio distances stay finite.
struct BandwidthHistogram {
    std::vector<double> bin_edges;  // size bins+1, strictly increasing from 0
    std::vector<double> pdf;        // per-bin mass, sums to 1
    std::vector<double> cdf;        // running sum of pdf
    double epsilon_floor = 1e-6;

    std::size_t bins() const { return pdf.size(); }
    double f_max() const { return bin_edges.empty() ? 0.0 : bin_edges.back(); }
    bool same_grid(const BandwidthHistogram& other) const;
    void validate() const;
};

// Default grid: 1 Hz bins from 0 to 100 Hz (Nyquist at 200 samples/s).
std::vector<double> default_bin_edges(double f_max = 100.0, double bin_hz = 1.0);

// Normalized histogram of bandwidth samples with epsilon-floor smoothing.
// Samples above f_max clamp into the last bin.
BandwidthHistogram estimate_pdf(std::span<const double> samples, std::vector<double> bin_edges,
                                double epsilon_floor = 1e-6);

// Per-bin counts -> histogram (same smoothing); used by streaming estimation.
BandwidthHistogram histogram_from_counts(const std::vector<double>& counts, std::vector<double> bin_edges,
                                         double epsilon_floor = 1e-6);

// N-person cumulative distribution: elementwise base.cdf ^ n.
std::vector<double> crowd_cdf(const BandwidthHistogram& base, int n);

// N-person PDF via first differences of crowd_cdf (exact for histograms),
// floor-smoothed and renormalized.
BandwidthHistogram crowd_pdf(const BandwidthHistogram& base, int n);

// Family of N-person priors for N = 1..n_max.
struct CrowdPriorSet {
    int n_max = 0;
    std::vector<BandwidthHistogram> priors;  // priors[N-1]

    const BandwidthHistogram& prior(int n) const;
};

CrowdPriorSet build_prior_set(const BandwidthHistogram& base, int n_max);

}  // namespace crowdcount
