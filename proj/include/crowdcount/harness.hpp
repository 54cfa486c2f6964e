#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "crowdcount/anomaly.hpp"
#include "crowdcount/carson.hpp"
#include "crowdcount/matching.hpp"
#include "crowdcount/motion_model.hpp"
#include "crowdcount/types.hpp"

namespace crowdcount {

// Per-source fidget parameters are drawn from these ranges so synthetic
// individuals differ mildly from one another.
struct SourceRanges {
    double silent_mean_lo = 7.0, silent_mean_hi = 9.0;
    double fidget_mean_lo = 1.8, fidget_mean_hi = 2.6;
    double peak_speed_lo = 0.05;
    double peak_speed_hi_lo = 0.80, peak_speed_hi_hi = 0.90;
    int n_body_parts = 5;
    double envelope_smoothness_hz = 6.0;
};

struct PoolConfig {
    int n_sources = 24;
    int segments_per_source = 8;
    double segment_s = 180.0;
    double profile_rate_hz = 50.0;
    SourceRanges ranges;
    CarsonConfig carson;
};

// Measured bandwidth = clean + noise-floor offset + extractor jitter, clamped
// to [0, max_hz]. Applied once per measured series.
struct MeasurementModel {
    double floor_hz = 6.0;
    double jitter_hz = 2.5;
    double max_hz = 100.0;
};

struct Segment {
    int source_id = 0;
    BandwidthSeries bw;  // clean (pre-measurement) bandwidth
};

struct SegmentPool {
    double segment_duration_s = 180.0;
    double sample_period_s = 0.01;
    std::vector<Segment> segments;

    std::vector<int> source_ids() const;
};

// Synthetic sources -> speed profiles -> bandwidth -> fixed-duration segments.
SegmentPool build_segment_pool(const PoolConfig& config, std::uint64_t seed);

// Crowd bandwidth sample: n distinct segments drawn uniformly (sources may
// repeat), pointwise max-combined.
BandwidthSeries synth_crowd_sample(const SegmentPool& pool, int n, std::uint64_t seed);

BandwidthSeries measure(const BandwidthSeries& clean, const MeasurementModel& model, std::uint64_t seed);

// Sustained high-bandwidth plateaus modeling a person walking nearby.
struct WalkerConfig {
    bool enabled = false;
    double cover_lo = 0.10, cover_hi = 0.20;   // fraction of the timeline
    double duration_lo_s = 5.0, duration_hi_s = 15.0;
    double level_lo_frac = 0.60, level_hi_frac = 0.90;  // of max_hz
};

// Returns the ground-truth burst sample mask.
std::vector<char> inject_walkers(BandwidthSeries& measured, const WalkerConfig& config, double max_hz,
                                 std::uint64_t seed);

struct CvConfig {
    int k_folds = 3;
    int repeats = 5;
    int n_min = 1, n_max = 20;
    int samples_per_n = 3;        // test samples per N per fold per repeat
    int prior_headroom = 4;       // priors extend to n_max + headroom
    DistanceMetric metric = DistanceMetric::KL;
    double update_every_s = 1.0;
    double bin_hz = 1.0;
    double f_max = 100.0;
    double epsilon_floor = 1e-6;
    MeasurementModel measurement;
    WalkerConfig walker;
};

struct RunRecord {
    int repeat = 0;
    int fold = 0;
    int true_n = 0;
    int estimated_n = 0;
    double convergence_s = 0.0;
    double anomaly_flag_rate = 0.0;
};

struct ExperimentReport {
    std::vector<RunRecord> records;
    double mae = 0.0;
    double nmse = 0.0;
    double mean_convergence_s = 0.0;
    double median_convergence_s = 0.0;
    std::map<int, double> per_n_mae;
    DistanceMetric metric = DistanceMetric::KL;
    std::uint64_t seed = 0;
    nlohmann::json config_snapshot;

    void recompute_aggregates();
    nlohmann::json to_json() const;
};

// Source-held-out evaluation: per repeat, sources are partitioned into
// k_folds; each fold's segments are test data while the remaining sources
// build the prior. detector, when non-null, masks test traces before
// estimation.
ExperimentReport cross_validate(const SegmentPool& pool, const CvConfig& config,
                                const AutoencoderModel* detector, std::uint64_t seed);

// Full pipeline from a JSON config: pool synthesis, optional detector
// training, cross-validated estimation, artifact emission under out_dir with
// a hash manifest.
ExperimentReport run_end_to_end(const nlohmann::json& config, const std::filesystem::path& out_dir);

nlohmann::json default_run_config();

}  // namespace crowdcount
