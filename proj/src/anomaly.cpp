#include "crowdcount/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace crowdcount {

void AutoencoderModel::validate() const {
    if (input_dim < 1 || hidden_dim < 1) throw std::invalid_argument("AutoencoderModel: bad dims");
    if (w1.rows() != hidden_dim || w1.cols() != input_dim || b1.size() != hidden_dim ||
        w2.rows() != input_dim || w2.cols() != hidden_dim || b2.size() != input_dim)
        throw std::invalid_argument("AutoencoderModel: weight shapes inconsistent with dims");
    if (!(input_scale > 0.0)) throw std::invalid_argument("AutoencoderModel: input_scale must be > 0");
    auto finite = [](const auto& m) { return m.allFinite(); };
    if (!finite(w1) || !finite(b1) || !finite(w2) || !finite(b2))
        throw std::invalid_argument("AutoencoderModel: non-finite parameters");
}

void AnomalyConfig::validate() const {
    if (!(window_s > 0.0)) throw std::invalid_argument("AnomalyConfig: window_s must be > 0");
    if (!(threshold_ratio > 1.0)) throw std::invalid_argument("AnomalyConfig: threshold_ratio must be > 1");
    if (epochs < 1) throw std::invalid_argument("AnomalyConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("AnomalyConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("AnomalyConfig: learning_rate must be > 0");
    if (l2_weight < 0.0 || sparsity_weight < 0.0)
        throw std::invalid_argument("AnomalyConfig: regularizer weights must be >= 0");
    if (!(sparsity_target > 0.0 && sparsity_target < 1.0))
        throw std::invalid_argument("AnomalyConfig: sparsity_target must be in (0,1)");
}

std::vector<std::vector<double>> build_training_set(const std::vector<BandwidthSeries>& segment_pool, int n_lo,
                                                    int n_hi, std::size_t count, std::size_t window_len,
                                                    std::uint64_t seed) {
    if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("build_training_set: bad n range");
    if (window_len < 1) throw std::invalid_argument("build_training_set: window_len must be >= 1");

    std::vector<const BandwidthSeries*> usable;
    for (const auto& seg : segment_pool) {
        if (seg.values.size() >= window_len)
            usable.push_back(&seg);
        else
            std::cerr << "build_training_set: skipping segment shorter than window ("
                      << seg.values.size() << " < " << window_len << " samples)\n";
    }
    if (usable.empty()) throw std::invalid_argument("build_training_set: no usable segments");

    const std::size_t series_len = usable.front()->values.size();
    for (const auto* seg : usable)
        if (seg->values.size() != series_len)
            throw std::invalid_argument("build_training_set: usable segments have unequal lengths");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> n_dist(n_lo, n_hi);
    std::uniform_int_distribution<std::size_t> shift_dist(0, series_len - 1);
    std::uniform_int_distribution<std::size_t> crop_dist(0, series_len - window_len);

    std::vector<std::size_t> order(usable.size());
    std::vector<std::vector<double>> windows;
    windows.reserve(count);
    std::vector<double> combined(series_len);

    for (std::size_t w = 0; w < count; ++w) {
        const auto n = static_cast<std::size_t>(n_dist(rng));
        const std::size_t take = std::min(n, usable.size());

        // partial Fisher-Yates draw of `take` distinct segments
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, order.size() - 1);
            std::swap(order[i], order[pick(rng)]);
        }

        std::fill(combined.begin(), combined.end(), 0.0);
        for (std::size_t i = 0; i < take; ++i) {
            const auto& vals = usable[order[i]]->values;
            const std::size_t shift = shift_dist(rng);
            for (std::size_t k = 0; k < series_len; ++k) {
                const std::size_t src = k + shift < series_len ? k + shift : k + shift - series_len;
                combined[k] = std::max(combined[k], vals[src]);
            }
        }
        const std::size_t start = crop_dist(rng);
        windows.emplace_back(combined.begin() + static_cast<std::ptrdiff_t>(start),
                             combined.begin() + static_cast<std::ptrdiff_t>(start + window_len));
    }
    return windows;
}

namespace {

struct AdamState {
    Eigen::MatrixXd m, v;
    explicit AdamState(Eigen::Index rows, Eigen::Index cols)
        : m(Eigen::MatrixXd::Zero(rows, cols)), v(Eigen::MatrixXd::Zero(rows, cols)) {}

    template <class Param, class Grad>
    void step(Param& param, const Grad& grad, double lr, long t) {
        constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
        m = beta1 * m + (1.0 - beta1) * grad;
        v = beta2 * v + (1.0 - beta2) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        param -= ((lr / c1) * (m.array() / ((v.array() / c2).sqrt() + eps))).matrix();
    }
};

inline Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

}  // namespace

TrainResult train_autoencoder(const std::vector<std::vector<double>>& windows, const AnomalyConfig& config) {
    config.validate();
    if (windows.empty()) throw std::invalid_argument("train_autoencoder: no windows");
    const auto dim = static_cast<Eigen::Index>(windows.front().size());
    for (const auto& w : windows)
        if (static_cast<Eigen::Index>(w.size()) != dim)
            throw std::invalid_argument("train_autoencoder: windows of unequal length");

    const auto n_rows = static_cast<Eigen::Index>(windows.size());
    AutoencoderModel model;
    model.input_dim = static_cast<int>(dim);

    Eigen::MatrixXd x(n_rows, dim);
    for (Eigen::Index r = 0; r < n_rows; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) x(r, c) = windows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    x /= model.input_scale;

    const Eigen::Index hid = model.hidden_dim;

    // principal-subspace initialization keeps the sigmoids in their linear
    // range (codes near 0.5) and puts training close to the optimum
    const Eigen::RowVectorXd mu = x.colwise().mean();
    Eigen::MatrixXd xc = x.rowwise() - mu;
    const Eigen::MatrixXd cov = xc.transpose() * xc / static_cast<double>(std::max<Eigen::Index>(n_rows - 1, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw std::runtime_error("train_autoencoder: init eigensolver failed");

    constexpr double kEncoderGain = 0.3;
    Eigen::MatrixXd basis(dim, hid);  // leading eigenvectors, descending
    for (Eigen::Index c = 0; c < hid; ++c) {
        const Eigen::Index src = dim - 1 - c;
        if (src >= 0)
            basis.col(c) = eig.eigenvectors().col(src);
        else
            basis.col(c).setZero();
    }
    Eigen::VectorXd score_std(hid);
    for (Eigen::Index c = 0; c < hid; ++c) {
        const Eigen::VectorXd s = xc * basis.col(c);
        score_std(c) = std::sqrt(s.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n_rows, 1))) + 1e-9;
    }
    model.w1 = kEncoderGain * score_std.cwiseInverse().asDiagonal() * basis.transpose();
    model.b1 = -(model.w1 * mu.transpose());
    model.w2 = (4.0 / kEncoderGain) * basis * score_std.asDiagonal();
    model.b2 = mu.transpose() - model.w2 * Eigen::VectorXd::Constant(hid, 0.5);

    AdamState a_w1(hid, dim), a_b1(hid, 1), a_w2(dim, hid), a_b2(dim, 1);
    Eigen::VectorXd b1m = model.b1, b2m = model.b2;

    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_rows));
    std::iota(perm.begin(), perm.end(), 0);

    const double rho = config.sparsity_target;
    TrainResult result;
    long t = 0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(perm.begin(), perm.end(), rng);
        double epoch_loss = 0.0;
        long epoch_batches = 0;

        for (Eigen::Index start = 0; start < n_rows; start += config.batch_size) {
            const Eigen::Index nb = std::min<Eigen::Index>(config.batch_size, n_rows - start);
            Eigen::MatrixXd mb(nb, dim);
            for (Eigen::Index r = 0; r < nb; ++r) mb.row(r) = x.row(perm[static_cast<std::size_t>(start + r)]);

            const Eigen::MatrixXd h = sigmoid((mb * model.w1.transpose()).rowwise() + b1m.transpose());
            const Eigen::MatrixXd y = ((h * model.w2.transpose()).rowwise() + b2m.transpose());
            const Eigen::MatrixXd err = y - mb;

            const Eigen::VectorXd rho_hat =
                h.colwise().mean().cwiseMax(1e-9).cwiseMin(1.0 - 1e-9).transpose();
            double sparsity_kl = 0.0;
            for (Eigen::Index j = 0; j < hid; ++j)
                sparsity_kl += rho * std::log(rho / rho_hat(j)) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat(j)));

            const double mse = err.squaredNorm() / static_cast<double>(nb * dim);
            const double loss = mse + config.l2_weight * (model.w1.squaredNorm() + model.w2.squaredNorm()) +
                                config.sparsity_weight * sparsity_kl;
            if (!std::isfinite(loss))
                throw std::runtime_error("train_autoencoder: training diverged (non-finite loss at epoch " +
                                         std::to_string(epoch) + ")");
            epoch_loss += loss;
            ++epoch_batches;

            const Eigen::MatrixXd d_y = 2.0 * err / static_cast<double>(nb * dim);
            Eigen::VectorXd d_sparse(hid);
            for (Eigen::Index j = 0; j < hid; ++j)
                d_sparse(j) = config.sparsity_weight * (-rho / rho_hat(j) + (1.0 - rho) / (1.0 - rho_hat(j))) /
                              static_cast<double>(nb);
            const Eigen::MatrixXd d_h = (d_y * model.w2).rowwise() + d_sparse.transpose();
            const Eigen::MatrixXd d_z = d_h.cwiseProduct(h.cwiseProduct((1.0 - h.array()).matrix()));

            const Eigen::MatrixXd g_w2 = d_y.transpose() * h + 2.0 * config.l2_weight * model.w2;
            const Eigen::MatrixXd g_b2 = d_y.colwise().sum().transpose();
            const Eigen::MatrixXd g_w1 = d_z.transpose() * mb + 2.0 * config.l2_weight * model.w1;
            const Eigen::MatrixXd g_b1 = d_z.colwise().sum().transpose();

            ++t;
            a_w1.step(model.w1, g_w1, config.learning_rate, t);
            a_b1.step(b1m, g_b1, config.learning_rate, t);
            a_w2.step(model.w2, g_w2, config.learning_rate, t);
            a_b2.step(b2m, g_b2, config.learning_rate, t);
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(std::max(epoch_batches, 1L)));
    }

    model.b1 = b1m;
    model.b2 = b2m;

    // final mean reconstruction error over the training set
    const Eigen::MatrixXd h = sigmoid((x * model.w1.transpose()).rowwise() + model.b1.transpose());
    const Eigen::MatrixXd y = ((h * model.w2.transpose()).rowwise() + model.b2.transpose());
    model.train_error_mean = (y - x).squaredNorm() / static_cast<double>(n_rows * dim);
    model.validate();
    if (!(model.train_error_mean > 0.0))
        throw std::runtime_error("train_autoencoder: degenerate training (zero reconstruction error)");

    result.model = std::move(model);
    return result;
}

std::vector<double> window_errors(const BandwidthSeries& bw, const AutoencoderModel& model) {
    model.validate();
    bw.validate();
    const auto dim = static_cast<std::size_t>(model.input_dim);
    if (bw.values.size() < dim) throw std::invalid_argument("window_errors: series shorter than one window");

    const std::size_t n_windows = bw.values.size() - dim + 1;
    std::vector<double> errors(n_windows);

    constexpr std::size_t kBatch = 512;
    Eigen::MatrixXd mb(static_cast<Eigen::Index>(kBatch), static_cast<Eigen::Index>(dim));
    for (std::size_t start = 0; start < n_windows; start += kBatch) {
        const std::size_t nb = std::min(kBatch, n_windows - start);
        for (std::size_t r = 0; r < nb; ++r)
            for (std::size_t c = 0; c < dim; ++c)
                mb(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    bw.values[start + r + c] / model.input_scale;
        const auto block = mb.topRows(static_cast<Eigen::Index>(nb));
        const Eigen::MatrixXd h = sigmoid((block * model.w1.transpose()).rowwise() + model.b1.transpose());
        const Eigen::MatrixXd y = ((h * model.w2.transpose()).rowwise() + model.b2.transpose());
        const Eigen::VectorXd e = (y - block).rowwise().squaredNorm() / static_cast<double>(dim);
        for (std::size_t r = 0; r < nb; ++r) errors[start + r] = e(static_cast<Eigen::Index>(r));
    }
    return errors;
}

AnomalyMask flag_anomalies(const BandwidthSeries& bw, const AutoencoderModel& model, const AnomalyConfig& config) {
    config.validate();
    const auto errors = window_errors(bw, model);
    const double threshold = config.threshold_ratio * model.train_error_mean;
    const auto dim = static_cast<std::size_t>(model.input_dim);

    AnomalyMask mask;
    mask.anomalous.assign(bw.values.size(), 0);
    for (std::size_t j = 0; j < errors.size(); ++j) {
        if (errors[j] <= threshold) continue;
        const std::size_t end = std::min(j + dim, bw.values.size());
        for (std::size_t k = j; k < end; ++k) mask.anomalous[k] = 1;
    }
    return mask;
}

}  // namespace crowdcount
