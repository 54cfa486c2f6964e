#include "crowdcount/crowd_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crowdcount {

bool BandwidthHistogram::same_grid(const BandwidthHistogram& other) const {
    if (bin_edges.size() != other.bin_edges.size()) return false;
    for (std::size_t k = 0; k < bin_edges.size(); ++k)
        if (std::abs(bin_edges[k] - other.bin_edges[k]) > 1e-9) return false;
    return true;
}

void BandwidthHistogram::validate() const {
    if (bin_edges.size() < 2) throw std::invalid_argument("BandwidthHistogram: needs at least one bin");
    if (pdf.size() + 1 != bin_edges.size())
        throw std::invalid_argument("BandwidthHistogram: pdf/bin_edges size mismatch");
    if (cdf.size() != pdf.size()) throw std::invalid_argument("BandwidthHistogram: cdf/pdf size mismatch");
    for (std::size_t k = 1; k < bin_edges.size(); ++k)
        if (!(bin_edges[k] > bin_edges[k - 1]))
            throw std::invalid_argument("BandwidthHistogram: bin_edges must strictly increase");
    double sum = 0.0;
    for (double p : pdf) {
        if (!(p >= 0.0)) throw std::invalid_argument("BandwidthHistogram: negative mass");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("BandwidthHistogram: pdf does not sum to 1");
    if (std::abs(cdf.back() - 1.0) > 1e-9) throw std::invalid_argument("BandwidthHistogram: cdf does not end at 1");
}

std::vector<double> default_bin_edges(double f_max, double bin_hz) {
    if (!(f_max > 0.0) || !(bin_hz > 0.0)) throw std::invalid_argument("default_bin_edges: need positive grid");
    const auto bins = static_cast<std::size_t>(std::llround(f_max / bin_hz));
    std::vector<double> edges(bins + 1);
    for (std::size_t k = 0; k <= bins; ++k) edges[k] = static_cast<double>(k) * bin_hz;
    return edges;
}

namespace {

// Clamp every bin up to at least eps and remove the added mass from bins above
// the floor, proportionally to their excess. Exact: result sums to the input
// sum with every bin >= eps.
void apply_floor(std::vector<double>& pdf, double eps) {
    if (eps <= 0.0) return;
    double deficit = 0.0;
    double excess = 0.0;
    for (double p : pdf) {
        if (p < eps)
            deficit += eps - p;
        else
            excess += p - eps;
    }
    if (deficit == 0.0) return;
    if (excess <= deficit)
        throw std::invalid_argument("apply_floor: epsilon_floor too large for bin count");
    const double scale = (excess - deficit) / excess;
    for (double& p : pdf) p = p < eps ? eps : eps + (p - eps) * scale;
}

void finalize(BandwidthHistogram& h) {
    double sum = 0.0;
    for (double p : h.pdf) sum += p;
    if (!(sum > 0.0)) throw std::invalid_argument("histogram: zero total mass");
    for (double& p : h.pdf) p /= sum;
    apply_floor(h.pdf, h.epsilon_floor);
    h.cdf.resize(h.pdf.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < h.pdf.size(); ++k) {
        cum += h.pdf[k];
        h.cdf[k] = cum;
    }
    h.cdf.back() = 1.0;
}

}  // namespace

BandwidthHistogram estimate_pdf(std::span<const double> samples, std::vector<double> bin_edges,
                                double epsilon_floor) {
    if (samples.empty()) throw std::invalid_argument("estimate_pdf: empty sample set");
    if (bin_edges.size() < 2) throw std::invalid_argument("estimate_pdf: needs at least one bin");

    const std::size_t bins = bin_edges.size() - 1;
    std::vector<double> counts(bins, 0.0);
    for (double s : samples) {
        if (!std::isfinite(s) || s < bin_edges.front())
            throw std::invalid_argument("estimate_pdf: sample below grid or non-finite");
        auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), s);
        auto idx = static_cast<std::size_t>(std::distance(bin_edges.begin(), it));
        idx = idx == 0 ? 0 : idx - 1;
        counts[std::min(idx, bins - 1)] += 1.0;  // values above f_max clamp to last bin
    }
    return histogram_from_counts(counts, std::move(bin_edges), epsilon_floor);
}

BandwidthHistogram histogram_from_counts(const std::vector<double>& counts, std::vector<double> bin_edges,
                                         double epsilon_floor) {
    if (counts.size() + 1 != bin_edges.size())
        throw std::invalid_argument("histogram_from_counts: counts/bin_edges size mismatch");
    BandwidthHistogram h;
    h.bin_edges = std::move(bin_edges);
    h.pdf = counts;
    h.epsilon_floor = epsilon_floor;
    finalize(h);
    return h;
}

std::vector<double> crowd_cdf(const BandwidthHistogram& base, int n) {
    if (n < 1) throw std::invalid_argument("crowd_cdf: n must be >= 1");
    std::vector<double> out(base.cdf.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::pow(base.cdf[k], n);
    return out;
}

BandwidthHistogram crowd_pdf(const BandwidthHistogram& base, int n) {
    if (n < 1) throw std::invalid_argument("crowd_pdf: n must be >= 1");
    const auto cdf_n = crowd_cdf(base, n);
    BandwidthHistogram h;
    h.bin_edges = base.bin_edges;
    h.epsilon_floor = base.epsilon_floor;
    h.pdf.resize(cdf_n.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < cdf_n.size(); ++k) {
        h.pdf[k] = std::max(0.0, cdf_n[k] - prev);
        prev = cdf_n[k];
    }
    finalize(h);
    return h;
}

const BandwidthHistogram& CrowdPriorSet::prior(int n) const {
    if (n < 1 || n > n_max) throw std::invalid_argument("CrowdPriorSet: n out of range");
    return priors[static_cast<std::size_t>(n - 1)];
}

CrowdPriorSet build_prior_set(const BandwidthHistogram& base, int n_max) {
    if (n_max < 1) throw std::invalid_argument("build_prior_set: n_max must be >= 1");
    base.validate();
    CrowdPriorSet set;
    set.n_max = n_max;
    set.priors.reserve(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) set.priors.push_back(crowd_pdf(base, n));
    return set;
}

}  // namespace crowdcount
