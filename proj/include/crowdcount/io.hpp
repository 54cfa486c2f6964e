#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "crowdcount/anomaly.hpp"
#include "crowdcount/crowd_model.hpp"
#include "crowdcount/matching.hpp"
#include "crowdcount/motion_model.hpp"
#include "crowdcount/rf_sim.hpp"
#include "crowdcount/types.hpp"

namespace crowdcount::io {

// Landmark CSV: header frame,joint,x_px,y_px,visibility; sidecar JSON carries
// frame_rate and interpupillary_px.
LandmarkTrack read_landmarks(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_json);
void write_landmarks(const LandmarkTrack& track, const std::filesystem::path& csv_path,
                     const std::filesystem::path& sidecar_json);

// SpeedProfile CSV: header t_s,part_0,...,part_{M-1}.
SpeedProfile read_speed_profile(const std::filesystem::path& path);
void write_speed_profile(const SpeedProfile& profile, const std::filesystem::path& path);

// BandwidthSeries CSV: header t_s,bw_hz.
BandwidthSeries read_bandwidth_series(const std::filesystem::path& path);
void write_bandwidth_series(const BandwidthSeries& series, const std::filesystem::path& path);

// BasebandTrace CSV: header t_s,p_0,...,p_{K-1} (single stream: t_s,p).
std::vector<BasebandTrace> read_baseband_traces(const std::filesystem::path& path);
void write_baseband_traces(const std::vector<BasebandTrace>& traces, const std::filesystem::path& path);

// Spectrogram: JSON header (times, freqs, power_csv) plus a CSV power matrix,
// one row per time step.
void write_spectrogram(const Spectrogram& spec, const std::filesystem::path& json_path);

// Histogram JSON: {"bin_edges": [...], "pdf": [...]}.
BandwidthHistogram read_histogram(const std::filesystem::path& path);
void write_histogram(const BandwidthHistogram& hist, const std::filesystem::path& path);

// Prior-set JSON: {"1": {...}, "2": {...}, ...}.
CrowdPriorSet read_prior_set(const std::filesystem::path& path);
void write_prior_set(const CrowdPriorSet& priors, const std::filesystem::path& path);

// Autoencoder model JSON: dims, activation, row-major weights, input scale,
// train_error_mean.
AutoencoderModel read_model(const std::filesystem::path& path);
void write_model(const AutoencoderModel& model, const std::filesystem::path& path);

// Mask CSV: header t_s,anomalous.
AnomalyMask read_mask(const std::filesystem::path& path);
void write_mask(const AnomalyMask& mask, const BandwidthSeries& series, const std::filesystem::path& path);

// EstimateTrace CSV: header t_s,n_hat,dist_1,...,dist_nmax.
void write_estimate_trace(const EstimateTrace& trace, const std::filesystem::path& path);

// FNV-1a 64 content hash, used by run manifests.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace crowdcount::io
