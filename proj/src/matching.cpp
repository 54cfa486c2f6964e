#include "crowdcount/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace crowdcount {

DistanceMetric metric_from_string(const std::string& name) {
    if (name == "kl") return DistanceMetric::KL;
    if (name == "js") return DistanceMetric::JS;
    if (name == "tv") return DistanceMetric::TV;
    if (name == "bhat") return DistanceMetric::Bhattacharyya;
    throw std::invalid_argument("unknown metric '" + name + "' (expected kl|js|tv|bhat)");
}

std::string to_string(DistanceMetric metric) {
    switch (metric) {
        case DistanceMetric::KL: return "kl";
        case DistanceMetric::JS: return "js";
        case DistanceMetric::TV: return "tv";
        case DistanceMetric::Bhattacharyya: return "bhat";
    }
    return "?";
}

namespace {

double kl_raw(const std::vector<double>& p, const std::vector<double>& q) {
    double d = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] > 0.0) d += p[k] * std::log(p[k] / q[k]);
    return std::max(0.0, d);
}

}  // namespace

double distance(const BandwidthHistogram& p, const BandwidthHistogram& q, DistanceMetric metric) {
    if (!p.same_grid(q)) throw std::invalid_argument("distance: histograms on different grids");
    switch (metric) {
        case DistanceMetric::KL:
            return kl_raw(p.pdf, q.pdf);
        case DistanceMetric::JS: {
            std::vector<double> m(p.pdf.size());
            for (std::size_t k = 0; k < m.size(); ++k) m[k] = 0.5 * (p.pdf[k] + q.pdf[k]);
            return 0.5 * kl_raw(p.pdf, m) + 0.5 * kl_raw(q.pdf, m);
        }
        case DistanceMetric::TV: {
            double d = 0.0;
            for (std::size_t k = 0; k < p.pdf.size(); ++k) d += std::abs(p.pdf[k] - q.pdf[k]);
            return 0.5 * d;
        }
        case DistanceMetric::Bhattacharyya: {
            double bc = 0.0;
            for (std::size_t k = 0; k < p.pdf.size(); ++k) bc += std::sqrt(p.pdf[k] * q.pdf[k]);
            return std::max(0.0, -std::log(std::min(bc, 1.0)));
        }
    }
    throw std::invalid_argument("distance: bad metric");
}

CountEstimate estimate_count(const BandwidthHistogram& observed, const CrowdPriorSet& priors,
                             DistanceMetric metric) {
    if (priors.priors.empty()) throw std::invalid_argument("estimate_count: empty prior set");
    CountEstimate est;
    est.distances.resize(priors.priors.size());
    double best = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= priors.n_max; ++n) {
        const double d = distance(observed, priors.prior(n), metric);
        est.distances[static_cast<std::size_t>(n - 1)] = d;
        if (d < best) {  // strict: ties keep the smaller N
            best = d;
            est.n_hat = n;
        }
    }
    return est;
}

int EstimateTrace::final_estimate() const {
    if (estimates.empty()) throw std::logic_error("EstimateTrace: no estimates");
    return estimates.back();
}

EstimateTrace streaming_estimate(const BandwidthSeries& bw, const CrowdPriorSet& priors, DistanceMetric metric,
                                 const AnomalyMask* mask, double update_every_s) {
    bw.validate();
    if (bw.values.empty()) throw std::invalid_argument("streaming_estimate: empty series");
    if (priors.priors.empty()) throw std::invalid_argument("streaming_estimate: empty prior set");
    if (!(update_every_s > 0.0)) throw std::invalid_argument("streaming_estimate: update_every_s must be > 0");
    if (mask && mask->size() != bw.values.size())
        throw std::invalid_argument("streaming_estimate: mask length mismatch");

    const auto& edges = priors.priors.front().bin_edges;
    const double eps = priors.priors.front().epsilon_floor;
    const std::size_t bins = edges.size() - 1;
    std::vector<double> counts(bins, 0.0);
    std::size_t n_seen = 0;

    const auto stride = static_cast<std::size_t>(std::max(1LL, std::llround(update_every_s / bw.sample_period_s)));

    EstimateTrace trace;
    std::size_t consumed = 0;
    auto consume_until = [&](std::size_t end) {
        for (; consumed < end; ++consumed) {
            if (mask && mask->at(consumed)) continue;
            double v = std::min(bw.values[consumed], edges.back());
            auto it = std::upper_bound(edges.begin(), edges.end(), v);
            auto idx = static_cast<std::size_t>(std::distance(edges.begin(), it));
            idx = idx == 0 ? 0 : idx - 1;
            counts[std::min(idx, bins - 1)] += 1.0;
            ++n_seen;
        }
    };
    auto update_at = [&](std::size_t end) {
        consume_until(end);
        if (n_seen == 0) return;  // estimate withheld while everything is masked
        const auto obs = histogram_from_counts(counts, edges, eps);
        auto est = estimate_count(obs, priors, metric);
        trace.times.push_back(bw.time_at(end - 1));
        trace.estimates.push_back(est.n_hat);
        trace.distances.push_back(std::move(est.distances));
    };

    for (std::size_t end = stride; end <= bw.values.size(); end += stride) update_at(end);
    if (consumed < bw.values.size()) update_at(bw.values.size());

    return trace;
}

double convergence_time(const EstimateTrace& trace) {
    if (trace.empty()) throw std::invalid_argument("convergence_time: empty trace");
    const int final_n = trace.final_estimate();
    double t_conv = 0.0;
    for (std::size_t k = 0; k < trace.estimates.size(); ++k)
        if (std::abs(trace.estimates[k] - final_n) > 1) t_conv = trace.times[k];
    return t_conv;
}

Score score(const std::vector<int>& true_counts, const std::vector<int>& estimates) {
    if (true_counts.size() != estimates.size() || true_counts.empty())
        throw std::invalid_argument("score: need equal nonempty lengths");
    Score s;
    for (std::size_t k = 0; k < true_counts.size(); ++k) {
        if (true_counts[k] < 1) throw std::invalid_argument("score: true counts must be >= 1");
        const double e = std::abs(estimates[k] - true_counts[k]);
        s.mae += e;
        s.nmse += e * e / (static_cast<double>(true_counts[k]) * static_cast<double>(true_counts[k]));
    }
    s.mae /= static_cast<double>(true_counts.size());
    s.nmse /= static_cast<double>(true_counts.size());
    return s;
}

}  // namespace crowdcount
