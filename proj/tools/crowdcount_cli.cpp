// Command-line front end for the seated-crowd counting pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "crowdcount/anomaly.hpp"
#include "crowdcount/carson.hpp"
#include "crowdcount/crowd_model.hpp"
#include "crowdcount/harness.hpp"
#include "crowdcount/io.hpp"
#include "crowdcount/matching.hpp"
#include "crowdcount/motion_model.hpp"
#include "crowdcount/rf_sim.hpp"

using namespace crowdcount;
using nlohmann::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    in >> j;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seated-crowd size estimation from motion-modulated RF bandwidth"};
    app.require_subcommand(1);

    // ---- synth-profiles ----
    auto* synth = app.add_subcommand("synth-profiles", "Generate synthetic fidget speed profiles");
    std::string synth_out = "profile.csv";
    double synth_duration = 180.0, synth_rate = 50.0;
    FidgetProcessParams fidget;
    std::uint64_t synth_seed = 1;
    synth->add_option("-o,--out", synth_out, "Output SpeedProfile CSV");
    synth->add_option("--duration-s", synth_duration, "Duration in seconds");
    synth->add_option("--sample-rate", synth_rate, "Samples per second");
    synth->add_option("--silent-mean-s", fidget.silent_mean_s, "Mean silent-gap duration");
    synth->add_option("--fidget-mean-s", fidget.fidget_mean_s, "Mean fidget-burst duration");
    synth->add_option("--peak-lo", fidget.peak_speed_lo, "Burst peak speed lower bound, m/s");
    synth->add_option("--peak-hi", fidget.peak_speed_hi, "Burst peak speed upper bound, m/s");
    synth->add_option("--parts", fidget.n_body_parts, "Number of body parts");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->callback([&] {
        fidget.seed = synth_seed;
        io::write_speed_profile(synth_fidget_profile(fidget, synth_duration, synth_rate), synth_out);
        std::cout << "wrote " << synth_out << "\n";
    });

    // ---- landmarks-ingest ----
    auto* ingest = app.add_subcommand("landmarks-ingest", "Convert pose-landmark CSV to a speed profile");
    std::string lm_csv, lm_meta, lm_out = "profile.csv";
    double lm_cutoff = 6.0, lm_vis_floor = 0.5;
    ingest->add_option("csv", lm_csv, "Landmark CSV (frame,joint,x_px,y_px,visibility)")->required();
    ingest->add_option("sidecar", lm_meta, "Sidecar JSON with frame_rate and interpupillary_px")->required();
    ingest->add_option("-o,--out", lm_out, "Output SpeedProfile CSV");
    ingest->add_option("--lowpass-hz", lm_cutoff, "Low-pass cutoff for joint speeds");
    ingest->add_option("--visibility-floor", lm_vis_floor, "Landmarks below this visibility contribute zero speed");
    ingest->callback([&] {
        const auto track = io::read_landmarks(lm_csv, lm_meta);
        io::write_speed_profile(landmarks_to_speeds(track, lm_cutoff, lm_vis_floor), lm_out);
        std::cout << "wrote " << lm_out << "\n";
    });

    // ---- carson ----
    auto* cars = app.add_subcommand("carson", "Speed profile to predicted bandwidth series");
    std::string carson_in, carson_out = "bandwidth.csv";
    CarsonConfig carson_cfg;
    cars->add_option("profile", carson_in, "Input SpeedProfile CSV")->required();
    cars->add_option("-o,--out", carson_out, "Output BandwidthSeries CSV");
    cars->add_option("--wavelength-m", carson_cfg.wavelength_m, "Carrier wavelength, m");
    cars->add_option("--psi", carson_cfg.psi, "Geometric factor");
    cars->add_option("--window-s", carson_cfg.window_s, "Analysis window, s");
    cars->add_option("--shift-s", carson_cfg.shift_s, "Window shift, s");
    cars->add_option("--power-fraction", carson_cfg.speed_band_power_fraction, "Spectral power fraction");
    cars->callback([&] {
        io::write_bandwidth_series(carson_bandwidth(io::read_speed_profile(carson_in), carson_cfg), carson_out);
        std::cout << "wrote " << carson_out << "\n";
    });

    // ---- rf-sim ----
    auto* rf = app.add_subcommand("rf-sim", "Simulate received power and extract bandwidth");
    std::string rf_in, rf_out = "bandwidth.csv", rf_trace_out, rf_spec_out;
    int rf_streams = 5, rf_components = 5;
    double rf_rate = 200.0, rf_wavelength = 0.0564, rf_noise = 0.0, rf_psi = 2.0;
    double rf_amp_lo = 0.8, rf_amp_hi = 1.2, rf_window = 1.0, rf_shift = 0.01, rf_fraction = 0.95;
    std::uint64_t rf_seed = 1;
    rf->add_option("profile", rf_in, "Input SpeedProfile CSV")->required();
    rf->add_option("-o,--out", rf_out, "Output BandwidthSeries CSV");
    rf->add_option("--streams", rf_streams, "Number of simulated power streams");
    rf->add_option("--pca-components", rf_components, "PCA components to average (when streams > 1)");
    rf->add_option("--sample-rate", rf_rate, "Trace sample rate, Hz");
    rf->add_option("--wavelength-m", rf_wavelength, "Carrier wavelength, m");
    rf->add_option("--noise-std", rf_noise, "Additive white noise std");
    rf->add_option("--psi", rf_psi, "Geometric factor");
    rf->add_option("--window-s", rf_window, "Spectrogram window, s");
    rf->add_option("--shift-s", rf_shift, "Spectrogram shift, s");
    rf->add_option("--power-fraction", rf_fraction, "Bandwidth power fraction");
    rf->add_option("--dump-trace", rf_trace_out, "Also write the power trace CSV");
    rf->add_option("--dump-spectrogram", rf_spec_out, "Also write the spectrogram JSON+CSV");
    rf->add_option("--seed", rf_seed, "RNG seed");
    rf->callback([&] {
        const auto profile = io::read_speed_profile(rf_in);
        const auto streams =
            synth_power_streams(profile, rf_streams, rf_wavelength, rf_rate, rf_noise, rf_psi, rf_amp_lo, rf_amp_hi, rf_seed);
        if (!rf_trace_out.empty()) io::write_baseband_traces(streams, rf_trace_out);
        const Spectrogram spec = streams.size() > 1
                                     ? pca_average_spectrogram(streams, std::min<int>(rf_components, static_cast<int>(streams.size())), rf_window, rf_shift)
                                     : spectrogram(streams.front(), rf_window, rf_shift);
        if (!rf_spec_out.empty()) io::write_spectrogram(spec, rf_spec_out);
        io::write_bandwidth_series(extract_bandwidth(spec, rf_fraction), rf_out);
        std::cout << "wrote " << rf_out << "\n";
    });

    // ---- prior-build ----
    auto* prior = app.add_subcommand("prior-build", "Build single-person PDF and crowd prior set");
    std::vector<std::string> prior_in;
    std::string prior_hist_out = "base_histogram.json", prior_set_out = "priors.json";
    int prior_nmax = 20;
    double prior_fmax = 100.0, prior_bin = 1.0, prior_eps = 1e-6;
    prior->add_option("bandwidth", prior_in, "Input BandwidthSeries CSVs")->required()->expected(-1);
    prior->add_option("--histogram-out", prior_hist_out, "Output base histogram JSON");
    prior->add_option("-o,--out", prior_set_out, "Output prior-set JSON");
    prior->add_option("--n-max", prior_nmax, "Largest modeled crowd size");
    prior->add_option("--f-max", prior_fmax, "Histogram upper edge, Hz");
    prior->add_option("--bin-hz", prior_bin, "Histogram bin width, Hz");
    prior->add_option("--epsilon-floor", prior_eps, "Per-bin mass floor");
    prior->callback([&] {
        std::vector<double> samples;
        for (const auto& path : prior_in) {
            const auto bw = io::read_bandwidth_series(path);
            samples.insert(samples.end(), bw.values.begin(), bw.values.end());
        }
        const auto base = estimate_pdf(samples, default_bin_edges(prior_fmax, prior_bin), prior_eps);
        io::write_histogram(base, prior_hist_out);
        io::write_prior_set(build_prior_set(base, prior_nmax), prior_set_out);
        std::cout << "wrote " << prior_hist_out << " and " << prior_set_out << "\n";
    });

    // ---- anomaly-train ----
    auto* atrain = app.add_subcommand("anomaly-train", "Train the reconstruction anomaly detector");
    std::vector<std::string> atrain_in;
    std::string atrain_out = "anomaly_model.json";
    std::size_t atrain_count = 20000;
    int atrain_nlo = 1, atrain_nhi = 20;
    AnomalyConfig atrain_cfg;
    atrain->add_option("segments", atrain_in, "Single-person BandwidthSeries CSVs")->required()->expected(-1);
    atrain->add_option("-o,--out", atrain_out, "Output model JSON");
    atrain->add_option("--windows", atrain_count, "Training windows to synthesize");
    atrain->add_option("--n-lo", atrain_nlo, "Smallest synthetic crowd size");
    atrain->add_option("--n-hi", atrain_nhi, "Largest synthetic crowd size");
    atrain->add_option("--epochs", atrain_cfg.epochs, "Training epochs");
    atrain->add_option("--learning-rate", atrain_cfg.learning_rate, "Learning rate");
    atrain->add_option("--l2-weight", atrain_cfg.l2_weight, "L2 penalty weight");
    atrain->add_option("--sparsity-weight", atrain_cfg.sparsity_weight, "Sparsity penalty weight");
    atrain->add_option("--seed", atrain_cfg.seed, "RNG seed");
    atrain->callback([&] {
        std::vector<BandwidthSeries> pool;
        for (const auto& path : atrain_in) pool.push_back(io::read_bandwidth_series(path));
        const auto window_len =
            static_cast<std::size_t>(std::llround(atrain_cfg.window_s / pool.front().sample_period_s));
        const auto windows = build_training_set(pool, atrain_nlo, atrain_nhi, atrain_count, window_len,
                                                derive_seed(atrain_cfg.seed, "cli-windows"));
        const auto result = train_autoencoder(windows, atrain_cfg);
        io::write_model(result.model, atrain_out);
        std::cout << "wrote " << atrain_out << " (train_error_mean=" << result.model.train_error_mean << ")\n";
    });

    // ---- anomaly-flag ----
    auto* aflag = app.add_subcommand("anomaly-flag", "Flag anomalous samples in a bandwidth series");
    std::string aflag_bw, aflag_model, aflag_out = "mask.csv";
    double aflag_ratio = 1.5;
    aflag->add_option("bandwidth", aflag_bw, "Input BandwidthSeries CSV")->required();
    aflag->add_option("model", aflag_model, "Trained model JSON")->required();
    aflag->add_option("-o,--out", aflag_out, "Output mask CSV");
    aflag->add_option("--threshold-ratio", aflag_ratio, "Flag above ratio x training error");
    aflag->callback([&] {
        const auto bw = io::read_bandwidth_series(aflag_bw);
        const auto model = io::read_model(aflag_model);
        AnomalyConfig cfg;
        cfg.threshold_ratio = aflag_ratio;
        cfg.window_s = static_cast<double>(model.input_dim) * bw.sample_period_s;
        const auto mask = flag_anomalies(bw, model, cfg);
        io::write_mask(mask, bw, aflag_out);
        std::cout << "wrote " << aflag_out << " (flag rate " << mask.flag_rate() << ")\n";
    });

    // ---- estimate ----
    auto* est = app.add_subcommand("estimate", "Streaming crowd-size estimate from a bandwidth series");
    std::string est_bw, est_priors, est_mask, est_out = "estimate_trace.csv", est_metric = "kl";
    double est_update = 1.0;
    est->add_option("bandwidth", est_bw, "Observed BandwidthSeries CSV")->required();
    est->add_option("priors", est_priors, "Prior-set JSON")->required();
    est->add_option("-o,--out", est_out, "Output EstimateTrace CSV");
    est->add_option("--mask", est_mask, "Optional anomaly mask CSV");
    est->add_option("--metric", est_metric, "Distance metric: kl|js|tv|bhat");
    est->add_option("--update-every-s", est_update, "Estimate update cadence, s");
    est->callback([&] {
        const auto bw = io::read_bandwidth_series(est_bw);
        const auto priors = io::read_prior_set(est_priors);
        std::optional<AnomalyMask> mask;
        if (!est_mask.empty()) mask = io::read_mask(est_mask);
        const auto trace = streaming_estimate(bw, priors, metric_from_string(est_metric),
                                              mask ? &*mask : nullptr, est_update);
        io::write_estimate_trace(trace, est_out);
        if (trace.empty()) {
            std::cout << "no estimate: every sample was masked\n";
        } else {
            std::cout << "final estimate: " << trace.final_estimate()
                      << " (convergence " << convergence_time(trace) << " s), wrote " << est_out << "\n";
        }
    });

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "Cross-validated synthetic evaluation from a config");
    std::string sim_config, sim_out = "runs/sim";
    std::optional<std::uint64_t> sim_seed;
    bool sim_print_default = false;
    sim->add_option("--config", sim_config, "Config JSON (defaults used when omitted)");
    sim->add_option("-o,--out", sim_out, "Run directory");
    sim->add_option("--seed", sim_seed, "Override config seed");
    sim->add_flag("--print-default-config", sim_print_default, "Print the default config and exit");
    sim->callback([&] {
        if (sim_print_default) {
            std::cout << default_run_config().dump(2) << "\n";
            return;
        }
        json cfg = sim_config.empty() ? default_run_config() : load_config(sim_config);
        if (sim_seed) cfg["seed"] = *sim_seed;
        const auto report = run_end_to_end(cfg, sim_out);
        std::cout << "runs: " << report.records.size() << "  MAE " << report.mae << "  NMSE " << report.nmse
                  << "  mean convergence " << report.mean_convergence_s << " s\n"
                  << "artifacts in " << sim_out << "\n";
    });

    // ---- report ----
    auto* rep = app.add_subcommand("report", "Summarize a run report JSON");
    std::string rep_in;
    rep->add_option("report", rep_in, "report.json from a simulate run")->required();
    rep->callback([&] {
        const json j = load_config(rep_in);
        std::cout << "metric " << j.value("metric", std::string("?")) << "  runs "
                  << j.value("records", json::array()).size() << "\n"
                  << "MAE " << j.value("mae", 0.0) << "  NMSE " << j.value("nmse", 0.0) << "\n"
                  << "convergence mean " << j.value("mean_convergence_s", 0.0) << " s, median "
                  << j.value("median_convergence_s", 0.0) << " s\n";
        if (j.contains("per_n_mae")) {
            std::cout << "per-N MAE:";
            for (const auto& [n, m] : j["per_n_mae"].items()) std::cout << "  " << n << ":" << m.get<double>();
            std::cout << "\n";
        }
        if (j.contains("ms_per_data_second"))
            std::cout << "processing cost " << j["ms_per_data_second"].get<double>() << " ms per data second\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
