#include "crowdcount/io.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace crowdcount::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.precision(12);
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}

json load_json(const std::filesystem::path& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    return j;
}

void save_json(const json& j, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace

LandmarkTrack read_landmarks(const std::filesystem::path& csv_path, const std::filesystem::path& sidecar_json) {
    const json meta = load_json(sidecar_json);
    LandmarkTrack track;
    track.frame_rate = meta.at("frame_rate").get<double>();
    track.interpupillary_px = meta.at("interpupillary_px").get<double>();

    auto in = open_in(csv_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty landmark CSV: " + csv_path.string());

    // joint -> frame -> landmark, joints ordered by first appearance
    std::vector<std::string> joint_order;
    std::map<std::string, std::map<long, Landmark>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw std::runtime_error("bad landmark row: " + line);
        const long frame = std::stol(f[0]);
        const std::string& joint = f[1];
        if (rows.find(joint) == rows.end()) joint_order.push_back(joint);
        rows[joint][frame] = Landmark{std::stod(f[2]), std::stod(f[3]), std::stod(f[4])};
    }
    if (rows.empty()) throw std::runtime_error("no landmark rows: " + csv_path.string());

    long max_frame = -1;
    for (const auto& [joint, frames] : rows)
        if (!frames.empty()) max_frame = std::max(max_frame, frames.rbegin()->first);

    for (const auto& joint : joint_order) {
        std::vector<Landmark> seq(static_cast<std::size_t>(max_frame + 1), Landmark{0.0, 0.0, 0.0});
        for (const auto& [frame, lm] : rows[joint])
            if (frame >= 0) seq[static_cast<std::size_t>(frame)] = lm;
        track.joints.push_back(std::move(seq));
    }
    track.validate();
    return track;
}

void write_landmarks(const LandmarkTrack& track, const std::filesystem::path& csv_path,
                     const std::filesystem::path& sidecar_json) {
    auto out = open_out(csv_path);
    out << "frame,joint,x_px,y_px,visibility\n";
    for (std::size_t j = 0; j < track.joints.size(); ++j)
        for (std::size_t k = 0; k < track.joints[j].size(); ++k) {
            const auto& lm = track.joints[j][k];
            out << k << ",j" << j << ',' << lm.x_px << ',' << lm.y_px << ',' << lm.visibility << '\n';
        }
    save_json(json{{"frame_rate", track.frame_rate}, {"interpupillary_px", track.interpupillary_px}}, sidecar_json);
}

SpeedProfile read_speed_profile(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty profile CSV: " + path.string());
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "t_s")
        throw std::runtime_error("bad profile header: " + path.string());

    SpeedProfile profile;
    profile.channels.resize(header.size() - 1);
    double t0 = 0.0, t1 = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw std::runtime_error("bad profile row: " + line);
        const double t = std::stod(f[0]);
        if (n == 0) t0 = t;
        t1 = t;
        for (std::size_t c = 1; c < f.size(); ++c) profile.channels[c - 1].push_back(std::stod(f[c]));
        ++n;
    }
    if (n < 2) throw std::runtime_error("profile needs >= 2 samples: " + path.string());
    profile.sample_rate = static_cast<double>(n - 1) / (t1 - t0);
    profile.validate();
    return profile;
}

void write_speed_profile(const SpeedProfile& profile, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t_s";
    for (std::size_t m = 0; m < profile.channels.size(); ++m) out << ",part_" << m;
    out << '\n';
    for (std::size_t k = 0; k < profile.length(); ++k) {
        out << static_cast<double>(k) / profile.sample_rate;
        for (const auto& ch : profile.channels) out << ',' << ch[k];
        out << '\n';
    }
}

BandwidthSeries read_bandwidth_series(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty bandwidth CSV: " + path.string());

    BandwidthSeries series;
    double t0 = 0.0, t1 = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 2) throw std::runtime_error("bad bandwidth row: " + line);
        const double t = std::stod(f[0]);
        if (n == 0) t0 = t;
        t1 = t;
        series.values.push_back(std::stod(f[1]));
        ++n;
    }
    if (n < 2) throw std::runtime_error("bandwidth series needs >= 2 samples: " + path.string());
    series.t0_s = t0;
    series.sample_period_s = (t1 - t0) / static_cast<double>(n - 1);
    series.validate();
    return series;
}

void write_bandwidth_series(const BandwidthSeries& series, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t_s,bw_hz\n";
    for (std::size_t k = 0; k < series.values.size(); ++k)
        out << series.time_at(k) << ',' << series.values[k] << '\n';
}

std::vector<BasebandTrace> read_baseband_traces(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace CSV: " + path.string());
    const auto header = split_csv(line);
    if (header.size() < 2) throw std::runtime_error("bad trace header: " + path.string());

    std::vector<BasebandTrace> traces(header.size() - 1);
    double t0 = 0.0, t1 = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != header.size()) throw std::runtime_error("bad trace row: " + line);
        const double t = std::stod(f[0]);
        if (n == 0) t0 = t;
        t1 = t;
        for (std::size_t c = 1; c < f.size(); ++c) traces[c - 1].values.push_back(std::stod(f[c]));
        ++n;
    }
    if (n < 2) throw std::runtime_error("trace needs >= 2 samples: " + path.string());
    const double rate = static_cast<double>(n - 1) / (t1 - t0);
    for (auto& t : traces) {
        t.sample_rate = rate;
        t.validate();
    }
    return traces;
}

void write_baseband_traces(const std::vector<BasebandTrace>& traces, const std::filesystem::path& path) {
    if (traces.empty()) throw std::invalid_argument("write_baseband_traces: no traces");
    auto out = open_out(path);
    if (traces.size() == 1) {
        out << "t_s,p\n";
    } else {
        out << "t_s";
        for (std::size_t c = 0; c < traces.size(); ++c) out << ",p_" << c;
        out << '\n';
    }
    const std::size_t n = traces.front().values.size();
    for (std::size_t k = 0; k < n; ++k) {
        out << static_cast<double>(k) / traces.front().sample_rate;
        for (const auto& t : traces) out << ',' << t.values[k];
        out << '\n';
    }
}

void write_spectrogram(const Spectrogram& spec, const std::filesystem::path& json_path) {
    std::filesystem::path csv_path = json_path;
    csv_path.replace_extension(".power.csv");
    {
        auto out = open_out(csv_path);
        for (const auto& row : spec.power) {
            for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
            out << '\n';
        }
    }
    save_json(json{{"times", spec.times}, {"freqs", spec.freqs}, {"power_csv", csv_path.filename().string()}},
              json_path);
}

BandwidthHistogram read_histogram(const std::filesystem::path& path) {
    const json j = load_json(path);
    std::vector<double> counts = j.at("pdf").get<std::vector<double>>();
    auto edges = j.at("bin_edges").get<std::vector<double>>();
    const double eps = j.value("epsilon_floor", 1e-6);
    return histogram_from_counts(counts, std::move(edges), eps);
}

void write_histogram(const BandwidthHistogram& hist, const std::filesystem::path& path) {
    save_json(json{{"bin_edges", hist.bin_edges}, {"pdf", hist.pdf}, {"epsilon_floor", hist.epsilon_floor}}, path);
}

CrowdPriorSet read_prior_set(const std::filesystem::path& path) {
    const json j = load_json(path);
    CrowdPriorSet set;
    set.n_max = static_cast<int>(j.size());
    set.priors.resize(j.size());
    for (const auto& [key, value] : j.items()) {
        const int n = std::stoi(key);
        if (n < 1 || n > set.n_max) throw std::runtime_error("prior-set key out of range: " + key);
        auto edges = value.at("bin_edges").get<std::vector<double>>();
        set.priors[static_cast<std::size_t>(n - 1)] = histogram_from_counts(
            value.at("pdf").get<std::vector<double>>(), std::move(edges), value.value("epsilon_floor", 1e-6));
    }
    return set;
}

void write_prior_set(const CrowdPriorSet& priors, const std::filesystem::path& path) {
    json j;
    for (int n = 1; n <= priors.n_max; ++n) {
        const auto& h = priors.prior(n);
        j[std::to_string(n)] = {{"bin_edges", h.bin_edges}, {"pdf", h.pdf}, {"epsilon_floor", h.epsilon_floor}};
    }
    save_json(j, path);
}

AutoencoderModel read_model(const std::filesystem::path& path) {
    const json j = load_json(path);
    AutoencoderModel m;
    m.input_dim = j.at("input_dim").get<int>();
    m.hidden_dim = j.at("hidden_dim").get<int>();
    m.activation = j.at("activation").get<std::string>();
    m.input_scale = j.at("input_scale").get<double>();
    m.train_error_mean = j.at("train_error_mean").get<double>();

    auto fill = [](Eigen::MatrixXd& mat, const std::vector<double>& flat, Eigen::Index rows, Eigen::Index cols) {
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
            throw std::runtime_error("model weights: size mismatch");
        mat.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) mat(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    };
    Eigen::MatrixXd b1, b2;
    fill(m.w1, j.at("w1").get<std::vector<double>>(), m.hidden_dim, m.input_dim);
    fill(b1, j.at("b1").get<std::vector<double>>(), m.hidden_dim, 1);
    fill(m.w2, j.at("w2").get<std::vector<double>>(), m.input_dim, m.hidden_dim);
    fill(b2, j.at("b2").get<std::vector<double>>(), m.input_dim, 1);
    m.b1 = b1.col(0);
    m.b2 = b2.col(0);
    m.validate();
    return m;
}

void write_model(const AutoencoderModel& model, const std::filesystem::path& path) {
    auto flatten = [](const Eigen::MatrixXd& mat) {
        std::vector<double> flat(static_cast<std::size_t>(mat.rows() * mat.cols()));
        for (Eigen::Index r = 0; r < mat.rows(); ++r)
            for (Eigen::Index c = 0; c < mat.cols(); ++c)
                flat[static_cast<std::size_t>(r * mat.cols() + c)] = mat(r, c);
        return flat;
    };
    save_json(json{{"input_dim", model.input_dim},
                   {"hidden_dim", model.hidden_dim},
                   {"activation", model.activation},
                   {"input_scale", model.input_scale},
                   {"train_error_mean", model.train_error_mean},
                   {"w1", flatten(model.w1)},
                   {"b1", flatten(model.b1)},
                   {"w2", flatten(model.w2)},
                   {"b2", flatten(model.b2)}},
              path);
}

AnomalyMask read_mask(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty mask CSV: " + path.string());
    AnomalyMask mask;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 2) throw std::runtime_error("bad mask row: " + line);
        mask.anomalous.push_back(std::stoi(f[1]) != 0 ? 1 : 0);
    }
    return mask;
}

void write_mask(const AnomalyMask& mask, const BandwidthSeries& series, const std::filesystem::path& path) {
    if (mask.size() != series.values.size())
        throw std::invalid_argument("write_mask: mask/series length mismatch");
    auto out = open_out(path);
    out << "t_s,anomalous\n";
    for (std::size_t k = 0; k < mask.size(); ++k)
        out << series.time_at(k) << ',' << (mask.at(k) ? 1 : 0) << '\n';
}

void write_estimate_trace(const EstimateTrace& trace, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t_s,n_hat";
    const std::size_t nmax = trace.distances.empty() ? 0 : trace.distances.front().size();
    for (std::size_t n = 1; n <= nmax; ++n) out << ",dist_" << n;
    out << '\n';
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        out << trace.times[k] << ',' << trace.estimates[k];
        for (double d : trace.distances[k]) out << ',' << d;
        out << '\n';
    }
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash missing file: " + path.string());
    std::uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace crowdcount::io
