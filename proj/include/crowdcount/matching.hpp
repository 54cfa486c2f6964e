#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crowdcount/crowd_model.hpp"
#include "crowdcount/types.hpp"

namespace crowdcount {

enum class DistanceMetric { KL, JS, TV, Bhattacharyya };

DistanceMetric metric_from_string(const std::string& name);  // kl|js|tv|bhat
std::string to_string(DistanceMetric metric);

// Distribution distance on a shared grid (natural log). KL takes the observed
// distribution as its first argument.
double distance(const BandwidthHistogram& p, const BandwidthHistogram& q, DistanceMetric metric);

struct CountEstimate {
    int n_hat = 0;
    std::vector<double> distances;  // distances[N-1]
};

// argmin over N of distance(observed, priors[N]); ties break toward smaller N.
CountEstimate estimate_count(const BandwidthHistogram& observed, const CrowdPriorSet& priors,
                             DistanceMetric metric);

// Time-indexed crowd-size estimates. Times carry only update instants at which
// an estimate existed; a fully masked series yields an empty trace.
struct EstimateTrace {
    std::vector<double> times;                    // s
    std::vector<int> estimates;                   // N-hat(t)
    std::vector<std::vector<double>> distances;   // per-time, distances[N-1]

    bool empty() const { return estimates.empty(); }
    int final_estimate() const;
};

// Streaming estimation over a cumulative observation window: at each update
// instant (every update_every_s, plus the series end), estimate_count on the
// histogram of all unmasked samples so far. mask may be null.
EstimateTrace streaming_estimate(const BandwidthSeries& bw, const CrowdPriorSet& priors, DistanceMetric metric,
                                 const AnomalyMask* mask = nullptr, double update_every_s = 1.0);

// Latest time whose estimate deviates from the final one by more than 1;
// 0 when no such time exists (converged immediately).
double convergence_time(const EstimateTrace& trace);

struct Score {
    double mae = 0.0;
    double nmse = 0.0;
};

// MAE = mean |est - true|; NMSE = mean (est - true)^2 / true^2.
Score score(const std::vector<int>& true_counts, const std::vector<int>& estimates);

}  // namespace crowdcount
