#include "crowdcount/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "crowdcount/crowd_model.hpp"
#include "crowdcount/io.hpp"

namespace crowdcount {

using nlohmann::json;

std::vector<int> SegmentPool::source_ids() const {
    std::set<int> ids;
    for (const auto& seg : segments) ids.insert(seg.source_id);
    return {ids.begin(), ids.end()};
}

SegmentPool build_segment_pool(const PoolConfig& config, std::uint64_t seed) {
    if (config.n_sources < 1 || config.segments_per_source < 1)
        throw std::invalid_argument("build_segment_pool: need >= 1 source and segment");
    config.carson.validate();

    SegmentPool pool;
    pool.segment_duration_s = config.segment_s;
    pool.sample_period_s = config.carson.shift_s;
    const auto seg_len = static_cast<std::size_t>(std::llround(config.segment_s / config.carson.shift_s));

    for (int s = 0; s < config.n_sources; ++s) {
        std::mt19937_64 rng(derive_seed(seed, "source-params", static_cast<std::uint64_t>(s)));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const auto& r = config.ranges;

        FidgetProcessParams params;
        params.silent_mean_s = r.silent_mean_lo + (r.silent_mean_hi - r.silent_mean_lo) * unit(rng);
        params.fidget_mean_s = r.fidget_mean_lo + (r.fidget_mean_hi - r.fidget_mean_lo) * unit(rng);
        params.peak_speed_lo = r.peak_speed_lo;
        params.peak_speed_hi = r.peak_speed_hi_lo + (r.peak_speed_hi_hi - r.peak_speed_hi_lo) * unit(rng);
        params.n_body_parts = r.n_body_parts;
        params.envelope_smoothness_hz = r.envelope_smoothness_hz;
        params.seed = derive_seed(seed, "source-process", static_cast<std::uint64_t>(s));

        const double duration = config.segment_s * config.segments_per_source;
        const SpeedProfile profile = synth_fidget_profile(params, duration, config.profile_rate_hz);
        const BandwidthSeries bw = carson_bandwidth(profile, config.carson);

        for (int j = 0; j < config.segments_per_source; ++j) {
            const std::size_t start = static_cast<std::size_t>(j) * seg_len;
            if (start + seg_len > bw.values.size()) break;
            Segment seg;
            seg.source_id = s;
            seg.bw.sample_period_s = bw.sample_period_s;
            seg.bw.t0_s = 0.0;
            seg.bw.values.assign(bw.values.begin() + static_cast<std::ptrdiff_t>(start),
                                 bw.values.begin() + static_cast<std::ptrdiff_t>(start + seg_len));
            pool.segments.push_back(std::move(seg));
        }
    }
    if (pool.segments.empty()) throw std::runtime_error("build_segment_pool: produced no segments");
    return pool;
}

BandwidthSeries synth_crowd_sample(const SegmentPool& pool, int n, std::uint64_t seed) {
    if (pool.segments.empty()) throw std::invalid_argument("synth_crowd_sample: empty pool");
    if (n < 1) throw std::invalid_argument("synth_crowd_sample: n must be >= 1");
    if (static_cast<std::size_t>(n) > pool.segments.size())
        throw std::invalid_argument("synth_crowd_sample: n exceeds pool size");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(pool.segments.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), order.size() - 1);
        std::swap(order[static_cast<std::size_t>(i)], order[pick(rng)]);
    }

    BandwidthSeries out = pool.segments[order[0]].bw;
    for (int i = 1; i < n; ++i) {
        const auto& vals = pool.segments[order[static_cast<std::size_t>(i)]].bw.values;
        for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = std::max(out.values[k], vals[k]);
    }
    return out;
}

BandwidthSeries measure(const BandwidthSeries& clean, const MeasurementModel& model, std::uint64_t seed) {
    BandwidthSeries out = clean;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, model.jitter_hz);
    for (double& v : out.values) {
        v += model.floor_hz;
        if (model.jitter_hz > 0.0) v += jitter(rng);
        v = std::clamp(v, 0.0, model.max_hz);
    }
    return out;
}

std::vector<char> inject_walkers(BandwidthSeries& measured, const WalkerConfig& config, double max_hz,
                                 std::uint64_t seed) {
    std::vector<char> burst(measured.values.size(), 0);
    if (!config.enabled || measured.values.empty()) return burst;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double target_cover =
        (config.cover_lo + (config.cover_hi - config.cover_lo) * unit(rng)) * static_cast<double>(measured.values.size());

    std::size_t covered = 0;
    int guard = 0;
    while (static_cast<double>(covered) < target_cover && guard++ < 1000) {
        const double dur_s = config.duration_lo_s + (config.duration_hi_s - config.duration_lo_s) * unit(rng);
        const auto len = std::min(measured.values.size(),
                                  static_cast<std::size_t>(std::llround(dur_s / measured.sample_period_s)));
        if (len == 0) break;
        std::uniform_int_distribution<std::size_t> start_dist(0, measured.values.size() - len);
        const std::size_t start = start_dist(rng);
        const double level = (config.level_lo_frac + (config.level_hi_frac - config.level_lo_frac) * unit(rng)) * max_hz;
        for (std::size_t k = start; k < start + len; ++k) {
            measured.values[k] = std::min(std::max(measured.values[k], level), max_hz);
            if (!burst[k]) {
                burst[k] = 1;
                ++covered;
            }
        }
    }
    return burst;
}

void ExperimentReport::recompute_aggregates() {
    if (records.empty()) {
        mae = nmse = mean_convergence_s = median_convergence_s = 0.0;
        per_n_mae.clear();
        return;
    }
    double abs_sum = 0.0, sq_sum = 0.0, conv_sum = 0.0;
    std::map<int, std::pair<double, int>> per_n;
    std::vector<double> convs;
    convs.reserve(records.size());
    for (const auto& r : records) {
        const double e = std::abs(r.estimated_n - r.true_n);
        abs_sum += e;
        sq_sum += e * e / (static_cast<double>(r.true_n) * static_cast<double>(r.true_n));
        conv_sum += r.convergence_s;
        convs.push_back(r.convergence_s);
        auto& [sum, count] = per_n[r.true_n];
        sum += e;
        ++count;
    }
    const auto n = static_cast<double>(records.size());
    mae = abs_sum / n;
    nmse = sq_sum / n;
    mean_convergence_s = conv_sum / n;
    std::sort(convs.begin(), convs.end());
    median_convergence_s = convs.size() % 2 == 1
                               ? convs[convs.size() / 2]
                               : 0.5 * (convs[convs.size() / 2 - 1] + convs[convs.size() / 2]);
    per_n_mae.clear();
    for (const auto& [tn, sc] : per_n) per_n_mae[tn] = sc.first / sc.second;
}

json ExperimentReport::to_json() const {
    json rec = json::array();
    for (const auto& r : records)
        rec.push_back({{"repeat", r.repeat},
                       {"fold", r.fold},
                       {"true_n", r.true_n},
                       {"estimated_n", r.estimated_n},
                       {"convergence_s", r.convergence_s},
                       {"anomaly_flag_rate", r.anomaly_flag_rate},
                       {"metric", crowdcount::to_string(metric)}});
    json per_n = json::object();
    for (const auto& [n, m] : per_n_mae) per_n[std::to_string(n)] = m;
    return json{{"records", rec},
                {"mae", mae},
                {"nmse", nmse},
                {"mean_convergence_s", mean_convergence_s},
                {"median_convergence_s", median_convergence_s},
                {"per_n_mae", per_n},
                {"metric", crowdcount::to_string(metric)},
                {"seed", seed},
                {"config", config_snapshot}};
}

ExperimentReport cross_validate(const SegmentPool& pool, const CvConfig& config,
                                const AutoencoderModel* detector, std::uint64_t seed) {
    const auto sources = pool.source_ids();
    if (static_cast<int>(sources.size()) < config.k_folds)
        throw std::invalid_argument("cross_validate: fewer sources than folds");
    if (config.n_min < 1 || config.n_max < config.n_min)
        throw std::invalid_argument("cross_validate: bad n range");
    if (config.k_folds < 1 || config.repeats < 1 || config.samples_per_n < 1)
        throw std::invalid_argument("cross_validate: bad fold/repeat/sample counts");

    const auto edges = default_bin_edges(config.f_max, config.bin_hz);
    const int prior_n_max = config.n_max + std::max(0, config.prior_headroom);

    ExperimentReport report;
    report.metric = config.metric;
    report.seed = seed;

    for (int rep = 0; rep < config.repeats; ++rep) {
        std::vector<int> order = sources;
        std::mt19937_64 fold_rng(derive_seed(seed, "fold-shuffle", static_cast<std::uint64_t>(rep)));
        std::shuffle(order.begin(), order.end(), fold_rng);

        for (int fold = 0; fold < config.k_folds; ++fold) {
            // as-equal-as-possible contiguous partition of the shuffled sources
            const std::size_t total = order.size();
            const std::size_t lo = total * static_cast<std::size_t>(fold) / static_cast<std::size_t>(config.k_folds);
            const std::size_t hi =
                total * static_cast<std::size_t>(fold + 1) / static_cast<std::size_t>(config.k_folds);
            const std::set<int> test_sources(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                             order.begin() + static_cast<std::ptrdiff_t>(hi));

            // prior from measured single-person segments of the held-in sources
            std::vector<double> prior_samples;
            for (std::size_t si = 0; si < pool.segments.size(); ++si) {
                const auto& seg = pool.segments[si];
                if (test_sources.count(seg.source_id)) continue;
                const auto measured = measure(seg.bw, config.measurement,
                                              derive_seed(seed, "prior-measure", (static_cast<std::uint64_t>(rep) << 32) ^ si));
                prior_samples.insert(prior_samples.end(), measured.values.begin(), measured.values.end());
            }
            if (prior_samples.empty()) throw std::runtime_error("cross_validate: empty prior pool");
            const auto base = estimate_pdf(prior_samples, edges, config.epsilon_floor);
            const auto priors = build_prior_set(base, prior_n_max);

            SegmentPool test_pool;
            test_pool.segment_duration_s = pool.segment_duration_s;
            test_pool.sample_period_s = pool.sample_period_s;
            for (const auto& seg : pool.segments)
                if (test_sources.count(seg.source_id)) test_pool.segments.push_back(seg);

            for (int n = config.n_min; n <= config.n_max; ++n) {
                for (int i = 0; i < config.samples_per_n; ++i) {
                    const std::uint64_t run_tag = (static_cast<std::uint64_t>(rep) << 40) ^
                                                  (static_cast<std::uint64_t>(fold) << 32) ^
                                                  (static_cast<std::uint64_t>(n) << 16) ^
                                                  static_cast<std::uint64_t>(i);
                    auto crowd = synth_crowd_sample(test_pool, n, derive_seed(seed, "crowd-sample", run_tag));
                    auto trace_bw = measure(crowd, config.measurement, derive_seed(seed, "crowd-measure", run_tag));
                    inject_walkers(trace_bw, config.walker, config.measurement.max_hz,
                                   derive_seed(seed, "walker", run_tag));

                    RunRecord record;
                    record.repeat = rep;
                    record.fold = fold;
                    record.true_n = n;

                    std::optional<AnomalyMask> mask;
                    if (detector) {
                        AnomalyConfig flag_cfg;
                        flag_cfg.window_s = static_cast<double>(detector->input_dim) * trace_bw.sample_period_s;
                        mask = flag_anomalies(trace_bw, *detector, flag_cfg);
                        record.anomaly_flag_rate = mask->flag_rate();
                    }

                    const auto trace = streaming_estimate(trace_bw, priors, config.metric,
                                                          mask ? &*mask : nullptr, config.update_every_s);
                    if (trace.empty()) continue;  // everything masked: no estimate for this run
                    record.estimated_n = trace.final_estimate();
                    record.convergence_s = convergence_time(trace);
                    report.records.push_back(record);
                }
            }
        }
    }
    report.recompute_aggregates();
    return report;
}

json default_run_config() {
    return json{
        {"seed", 1},
        {"pool",
         {{"n_sources", 24},
          {"segments_per_source", 8},
          {"segment_s", 180.0},
          {"profile_rate_hz", 50.0},
          {"silent_mean_s", {7.0, 9.0}},
          {"fidget_mean_s", {1.8, 2.6}},
          {"peak_speed_lo", 0.05},
          {"peak_speed_hi", {0.80, 0.90}},
          {"n_body_parts", 5},
          {"envelope_smoothness_hz", 6.0}}},
        {"carson",
         {{"wavelength_m", 0.0564}, {"psi", 2.0}, {"window_s", 1.0}, {"shift_s", 0.01}, {"power_fraction", 0.95}}},
        {"measurement", {{"floor_hz", 6.0}, {"jitter_hz", 2.5}, {"max_hz", 100.0}}},
        {"matching",
         {{"metric", "kl"},
          {"update_every_s", 1.0},
          {"n_min", 1},
          {"n_max", 13},
          {"samples_per_n", 2},
          {"k_folds", 3},
          {"repeats", 1},
          {"prior_headroom", 4},
          {"bin_hz", 1.0},
          {"f_max", 100.0},
          {"epsilon_floor", 1e-6}}},
        {"anomaly",
         {{"enabled", false},
          {"training_windows", 8000},
          {"n_lo", 1},
          {"n_hi", 20},
          {"window_s", 2.0},
          {"threshold_ratio", 1.5},
          {"l2_weight", 1e-7},
          {"sparsity_weight", 3e-4},
          {"sparsity_target", 0.5},
          {"epochs", 50},
          {"learning_rate", 3e-3},
          {"batch_size", 64}}},
        {"walker",
         {{"enabled", false},
          {"cover", {0.10, 0.20}},
          {"duration_s", {5.0, 15.0}},
          {"level_frac", {0.60, 0.90}}}},
        {"artifacts", {{"max_traces", 12}}}};
}

namespace {

PoolConfig pool_config_from_json(const json& j) {
    PoolConfig cfg;
    const json p = j.value("pool", json::object());
    cfg.n_sources = p.value("n_sources", cfg.n_sources);
    cfg.segments_per_source = p.value("segments_per_source", cfg.segments_per_source);
    cfg.segment_s = p.value("segment_s", cfg.segment_s);
    cfg.profile_rate_hz = p.value("profile_rate_hz", cfg.profile_rate_hz);
    if (p.contains("silent_mean_s")) {
        cfg.ranges.silent_mean_lo = p["silent_mean_s"][0].get<double>();
        cfg.ranges.silent_mean_hi = p["silent_mean_s"][1].get<double>();
    }
    if (p.contains("fidget_mean_s")) {
        cfg.ranges.fidget_mean_lo = p["fidget_mean_s"][0].get<double>();
        cfg.ranges.fidget_mean_hi = p["fidget_mean_s"][1].get<double>();
    }
    cfg.ranges.peak_speed_lo = p.value("peak_speed_lo", cfg.ranges.peak_speed_lo);
    if (p.contains("peak_speed_hi")) {
        cfg.ranges.peak_speed_hi_lo = p["peak_speed_hi"][0].get<double>();
        cfg.ranges.peak_speed_hi_hi = p["peak_speed_hi"][1].get<double>();
    }
    cfg.ranges.n_body_parts = p.value("n_body_parts", cfg.ranges.n_body_parts);
    cfg.ranges.envelope_smoothness_hz = p.value("envelope_smoothness_hz", cfg.ranges.envelope_smoothness_hz);

    const json c = j.value("carson", json::object());
    cfg.carson.wavelength_m = c.value("wavelength_m", cfg.carson.wavelength_m);
    cfg.carson.psi = c.value("psi", cfg.carson.psi);
    cfg.carson.window_s = c.value("window_s", cfg.carson.window_s);
    cfg.carson.shift_s = c.value("shift_s", cfg.carson.shift_s);
    cfg.carson.speed_band_power_fraction = c.value("power_fraction", cfg.carson.speed_band_power_fraction);
    return cfg;
}

MeasurementModel measurement_from_json(const json& j) {
    MeasurementModel m;
    const json mm = j.value("measurement", json::object());
    m.floor_hz = mm.value("floor_hz", m.floor_hz);
    m.jitter_hz = mm.value("jitter_hz", m.jitter_hz);
    m.max_hz = mm.value("max_hz", m.max_hz);
    return m;
}

CvConfig cv_config_from_json(const json& j) {
    CvConfig cfg;
    const json m = j.value("matching", json::object());
    cfg.k_folds = m.value("k_folds", cfg.k_folds);
    cfg.repeats = m.value("repeats", cfg.repeats);
    cfg.n_min = m.value("n_min", cfg.n_min);
    cfg.n_max = m.value("n_max", cfg.n_max);
    cfg.samples_per_n = m.value("samples_per_n", cfg.samples_per_n);
    cfg.prior_headroom = m.value("prior_headroom", cfg.prior_headroom);
    cfg.metric = metric_from_string(m.value("metric", std::string("kl")));
    cfg.update_every_s = m.value("update_every_s", cfg.update_every_s);
    cfg.bin_hz = m.value("bin_hz", cfg.bin_hz);
    cfg.f_max = m.value("f_max", cfg.f_max);
    cfg.epsilon_floor = m.value("epsilon_floor", cfg.epsilon_floor);
    cfg.measurement = measurement_from_json(j);

    const json w = j.value("walker", json::object());
    cfg.walker.enabled = w.value("enabled", false);
    if (w.contains("cover")) {
        cfg.walker.cover_lo = w["cover"][0].get<double>();
        cfg.walker.cover_hi = w["cover"][1].get<double>();
    }
    if (w.contains("duration_s")) {
        cfg.walker.duration_lo_s = w["duration_s"][0].get<double>();
        cfg.walker.duration_hi_s = w["duration_s"][1].get<double>();
    }
    if (w.contains("level_frac")) {
        cfg.walker.level_lo_frac = w["level_frac"][0].get<double>();
        cfg.walker.level_hi_frac = w["level_frac"][1].get<double>();
    }
    return cfg;
}

AnomalyConfig anomaly_config_from_json(const json& a) {
    AnomalyConfig cfg;
    cfg.window_s = a.value("window_s", cfg.window_s);
    cfg.threshold_ratio = a.value("threshold_ratio", cfg.threshold_ratio);
    cfg.l2_weight = a.value("l2_weight", cfg.l2_weight);
    cfg.sparsity_weight = a.value("sparsity_weight", cfg.sparsity_weight);
    cfg.sparsity_target = a.value("sparsity_target", cfg.sparsity_target);
    cfg.epochs = a.value("epochs", cfg.epochs);
    cfg.learning_rate = a.value("learning_rate", cfg.learning_rate);
    cfg.batch_size = a.value("batch_size", cfg.batch_size);
    return cfg;
}

}  // namespace

ExperimentReport run_end_to_end(const json& config, const std::filesystem::path& out_dir) {
    json artifacts = json::array();
    auto add_artifact = [&](const std::filesystem::path& p) {
        artifacts.push_back({{"path", std::filesystem::relative(p, out_dir).string()},
                             {"fnv1a64", io::fnv1a64_file(p)}});
    };
    auto write_manifest = [&](bool incomplete, const std::string& error) {
        json m{{"artifacts", artifacts}, {"incomplete", incomplete}};
        if (!error.empty()) m["error"] = error;
        std::filesystem::create_directories(out_dir);
        std::ofstream out(out_dir / "manifest.json");
        out << m.dump(2) << '\n';
    };

    std::string stage = "config";
    try {
        const std::uint64_t seed = config.value("seed", 1);
        const PoolConfig pool_cfg = pool_config_from_json(config);
        CvConfig cv_cfg = cv_config_from_json(config);
        if (cv_cfg.n_min < 1)
            throw std::invalid_argument("run config: crowd sizes start at 1 (n_min >= 1)");

        stage = "pool-synthesis";
        const auto t_start = std::chrono::steady_clock::now();
        const SegmentPool pool = build_segment_pool(pool_cfg, derive_seed(seed, "pool"));

        stage = "anomaly-training";
        std::optional<AutoencoderModel> detector;
        const json a = config.value("anomaly", json::object());
        if (a.value("enabled", false)) {
            AnomalyConfig an_cfg = anomaly_config_from_json(a);
            an_cfg.seed = derive_seed(seed, "anomaly-train");
            const auto window_len =
                static_cast<std::size_t>(std::llround(an_cfg.window_s / pool.sample_period_s));
            std::vector<BandwidthSeries> clean_pool;
            clean_pool.reserve(pool.segments.size());
            for (const auto& seg : pool.segments) clean_pool.push_back(seg.bw);
            auto windows = build_training_set(clean_pool, a.value("n_lo", 1), a.value("n_hi", 20),
                                              a.value("training_windows", std::size_t{8000}), window_len,
                                              derive_seed(seed, "anomaly-windows"));
            // training windows pass through the same measurement model as traces
            std::mt19937_64 mrng(derive_seed(seed, "anomaly-window-measure"));
            std::normal_distribution<double> jitter(0.0, cv_cfg.measurement.jitter_hz);
            for (auto& w : windows)
                for (double& v : w)
                    v = std::clamp(v + cv_cfg.measurement.floor_hz + jitter(mrng), 0.0, cv_cfg.measurement.max_hz);
            detector = train_autoencoder(windows, an_cfg).model;
        }

        stage = "cross-validation";
        ExperimentReport report = cross_validate(pool, cv_cfg, detector ? &*detector : nullptr,
                                                 derive_seed(seed, "cv"));
        report.config_snapshot = config;
        report.seed = seed;
        const auto t_end = std::chrono::steady_clock::now();

        stage = "artifacts";
        std::filesystem::create_directories(out_dir);

        // representative prior set from the full pool, for plotting/debugging
        std::vector<double> all_samples;
        for (std::size_t si = 0; si < pool.segments.size(); ++si) {
            const auto measured = measure(pool.segments[si].bw, cv_cfg.measurement,
                                          derive_seed(seed, "artifact-measure", si));
            all_samples.insert(all_samples.end(), measured.values.begin(), measured.values.end());
        }
        const auto base = estimate_pdf(all_samples, default_bin_edges(cv_cfg.f_max, cv_cfg.bin_hz),
                                       cv_cfg.epsilon_floor);
        io::write_histogram(base, out_dir / "base_histogram.json");
        add_artifact(out_dir / "base_histogram.json");
        const auto priors = build_prior_set(base, cv_cfg.n_max + cv_cfg.prior_headroom);
        io::write_prior_set(priors, out_dir / "priors.json");
        add_artifact(out_dir / "priors.json");

        if (detector) {
            io::write_model(*detector, out_dir / "anomaly_model.json");
            add_artifact(out_dir / "anomaly_model.json");
        }

        // a few example estimate traces
        const int max_traces = config.value("artifacts", json::object()).value("max_traces", 12);
        int written = 0;
        for (int n = cv_cfg.n_min; n <= cv_cfg.n_max && written < max_traces; ++n) {
            auto crowd = synth_crowd_sample(pool, n, derive_seed(seed, "artifact-crowd", static_cast<std::uint64_t>(n)));
            auto trace_bw = measure(crowd, cv_cfg.measurement, derive_seed(seed, "artifact-trace", static_cast<std::uint64_t>(n)));
            std::optional<AnomalyMask> mask;
            if (detector) mask = flag_anomalies(trace_bw, *detector, anomaly_config_from_json(a));
            const auto trace =
                streaming_estimate(trace_bw, priors, cv_cfg.metric, mask ? &*mask : nullptr, cv_cfg.update_every_s);
            const auto path = out_dir / ("trace_n" + std::to_string(n) + ".csv");
            io::write_estimate_trace(trace, path);
            add_artifact(path);
            ++written;
        }

        const double wall_s = std::chrono::duration<double>(t_end - t_start).count();
        const double data_s = static_cast<double>(report.records.size()) * pool.segment_duration_s;
        json rj = report.to_json();
        rj["wall_seconds"] = wall_s;
        rj["processed_data_seconds"] = data_s;
        rj["ms_per_data_second"] = data_s > 0 ? 1000.0 * wall_s / data_s : 0.0;
        {
            std::ofstream out(out_dir / "report.json");
            out << rj.dump(2) << '\n';
        }
        add_artifact(out_dir / "report.json");

        write_manifest(false, "");
        return report;
    } catch (const std::exception& e) {
        write_manifest(true, "stage '" + stage + "': " + e.what());
        throw std::runtime_error("run_end_to_end failed at stage '" + stage + "': " + e.what());
    }
}

}  // namespace crowdcount
