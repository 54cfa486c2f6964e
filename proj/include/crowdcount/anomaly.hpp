#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "crowdcount/types.hpp"

namespace crowdcount {

// Single-hidden-layer reconstruction autoencoder: sigmoid hidden, linear
// output, inputs scaled by 1/input_scale (the RF Nyquist frequency).
struct AutoencoderModel {
    int input_dim = 200;   // 2 s window at 0.01 s bandwidth stride
    int hidden_dim = 32;
    Eigen::MatrixXd w1;    // hidden_dim x input_dim
    Eigen::VectorXd b1;    // hidden_dim
    Eigen::MatrixXd w2;    // input_dim x hidden_dim
    Eigen::VectorXd b2;    // input_dim
    std::string activation = "sigmoid";
    double input_scale = 100.0;
    double train_error_mean = 0.0;

    void validate() const;
};

struct AnomalyConfig {
    double window_s = 2.0;
    double threshold_ratio = 1.5;   // flag if error > ratio * train_error_mean
    double l2_weight = 1e-7;
    double sparsity_weight = 3e-4;
    double sparsity_target = 0.5;
    int epochs = 50;
    double learning_rate = 3e-3;
    int batch_size = 64;
    std::uint64_t seed = 1;

    void validate() const;
};

// Crowd-style training windows: per window, draw N uniform in [n_lo, n_hi],
// pick that many distinct pool segments (capped at the pool size), apply
// independent circular time shifts, max-combine, crop a random window of
// window_len samples. Segments shorter than the window are skipped with a
// warning; an empty usable pool is an error.
std::vector<std::vector<double>> build_training_set(const std::vector<BandwidthSeries>& segment_pool, int n_lo,
                                                    int n_hi, std::size_t count, std::size_t window_len,
                                                    std::uint64_t seed);

struct TrainResult {
    AutoencoderModel model;
    std::vector<double> epoch_losses;  // total objective, per-epoch mean
};

// Mini-batch training of reconstruction MSE + L2 weight penalty + KL sparsity
// penalty on mean hidden activation. Deterministic under config.seed.
TrainResult train_autoencoder(const std::vector<std::vector<double>>& windows, const AnomalyConfig& config);

// Per-position reconstruction errors of every sliding window (stride one sample).
std::vector<double> window_errors(const BandwidthSeries& bw, const AutoencoderModel& model);

// Slide the window across the series; every sample covered by a window whose
// reconstruction error exceeds threshold_ratio * train_error_mean is flagged.
AnomalyMask flag_anomalies(const BandwidthSeries& bw, const AutoencoderModel& model, const AnomalyConfig& config);

}  // namespace crowdcount
