#include "radarseg/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace radarseg {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// dataset JSONL
// ---------------------------------------------------------------------------

void write_dataset_jsonl(const std::string& path, std::span<const RadarReturn> returns,
                         const DatasetHeader& header) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write file: " + path);
    char line[512];
    std::snprintf(line, sizeof(line),
                  "{\"schema\":\"radarseg.dataset.v%u\",\"seed\":%llu,\"config\":\"%016llx\"}\n",
                  header.schema_version, static_cast<unsigned long long>(header.seed),
                  static_cast<unsigned long long>(header.config_hash));
    std::fputs(line, f);
    for (const RadarReturn& r : returns) {
        int n;
        if (r.label) {
            n = std::snprintf(line, sizeof(line),
                              "{\"t\":%.12g,\"r\":%.12g,\"az\":%.12g,\"el\":%.12g,"
                              "\"x\":%.12g,\"y\":%.12g,\"z\":%.12g,"
                              "\"doppler\":%.12g,\"rcs\":%.12g,\"label\":%d}\n",
                              r.t, r.polar.range, r.polar.azimuth, r.polar.elevation, r.cartesian.x,
                              r.cartesian.y, r.cartesian.z, r.doppler, r.rcs,
                              static_cast<int>(*r.label));
        } else {
            n = std::snprintf(line, sizeof(line),
                              "{\"t\":%.12g,\"r\":%.12g,\"az\":%.12g,\"el\":%.12g,"
                              "\"x\":%.12g,\"y\":%.12g,\"z\":%.12g,"
                              "\"doppler\":%.12g,\"rcs\":%.12g}\n",
                              r.t, r.polar.range, r.polar.azimuth, r.polar.elevation, r.cartesian.x,
                              r.cartesian.y, r.cartesian.z, r.doppler, r.rcs);
        }
        if (n < 0 || std::fputs(line, f) == EOF) {
            std::fclose(f);
            throw DataError("write failed: " + path);
        }
    }
    std::fclose(f);
}

DatasetFile read_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing dataset file: " + path);
    DatasetFile out;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file: " + path);
    try {
        const json header = json::parse(line);
        const std::string schema = header.at("schema").get<std::string>();
        const std::string expected = "radarseg.dataset.v" + std::to_string(kDatasetSchemaVersion);
        if (schema != expected) {
            throw DataError("dataset schema mismatch: found " + schema + ", expected " + expected);
        }
        out.header.seed = header.at("seed").get<std::uint64_t>();
        out.header.config_hash =
            std::stoull(header.at("config").get<std::string>(), nullptr, 16);
    } catch (const json::exception& e) {
        throw DataError("bad dataset header in " + path + ": " + e.what());
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            RadarReturn r;
            r.t = j.at("t").get<double>();
            r.polar.range = j.at("r").get<double>();
            r.polar.azimuth = j.at("az").get<double>();
            r.polar.elevation = j.at("el").get<double>();
            r.cartesian.x = j.at("x").get<double>();
            r.cartesian.y = j.at("y").get<double>();
            r.cartesian.z = j.at("z").get<double>();
            r.doppler = j.at("doppler").get<double>();
            r.rcs = j.at("rcs").get<double>();
            if (j.contains("label")) r.label = class_from_code(j.at("label").get<int>());
            out.returns.push_back(r);
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad return line: " + e.what());
        }
    }
    return out;
}

void write_dataset_manifest(const std::string& dataset_path,
                            std::span<const RadarReturn> returns, const DatasetHeader& header,
                            double duration_s) {
    std::array<std::int64_t, kNumClasses + 1> counts{};
    for (const auto& r : returns) counts[r.label ? static_cast<int>(*r.label) : 0] += 1;
    ordered_json m;
    m["schema"] = "radarseg.manifest.v1";
    m["dataset_schema_version"] = header.schema_version;
    m["seed"] = header.seed;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(header.config_hash));
    m["config"] = hex;
    m["duration_s"] = duration_s;
    m["total_returns"] = returns.size();
    ordered_json c;
    for (int i = 1; i <= kNumClasses; ++i) {
        c[class_name(static_cast<ClassLabel>(i))] = counts[static_cast<std::size_t>(i)];
    }
    c["unlabeled"] = counts[0];
    m["counts"] = c;
    write_file(dataset_path + ".manifest.json", m.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// tracks JSONL
// ---------------------------------------------------------------------------

void write_tracks_jsonl(const std::string& path, const TracksFile& tracks,
                        std::uint64_t config_hash) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw DataError("cannot write file: " + path);
    char line[512];
    std::snprintf(line, sizeof(line), "{\"schema\":\"radarseg.tracks.v1\",\"config\":\"%016llx\"}\n",
                  static_cast<unsigned long long>(config_hash));
    std::fputs(line, f);
    for (std::size_t i = 0; i < tracks.tracks.size(); ++i) {
        const TargetTrack& t = tracks.tracks[i];
        std::snprintf(line, sizeof(line),
                      "{\"kind\":\"track\",\"track\":%zu,\"label\":%d,\"w\":%.12g,\"l\":%.12g,"
                      "\"h\":%.12g}\n",
                      i, static_cast<int>(t.spec.cls), t.spec.width_m, t.spec.length_m,
                      t.spec.height_m);
        std::fputs(line, f);
        for (const TrackFix& fix : t.fixes) {
            std::snprintf(line, sizeof(line),
                          "{\"kind\":\"fix\",\"track\":%zu,\"t\":%.12g,\"x\":%.12g,\"y\":%.12g,"
                          "\"z\":%.12g}\n",
                          i, fix.t, fix.position.x, fix.position.y, fix.position.z);
            std::fputs(line, f);
        }
    }
    for (const auto& [t, pose] : tracks.sensor_poses) {
        std::snprintf(line, sizeof(line),
                      "{\"kind\":\"pose\",\"t\":%.12g,\"x\":%.12g,\"y\":%.12g,\"z\":%.12g,"
                      "\"yaw\":%.12g}\n",
                      t, pose.position.x, pose.position.y, pose.position.z, pose.yaw);
        std::fputs(line, f);
    }
    std::fclose(f);
}

TracksFile read_tracks_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing tracks file: " + path);
    TracksFile out;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty tracks file: " + path);
    try {
        const json header = json::parse(line);
        if (header.at("schema").get<std::string>() != "radarseg.tracks.v1") {
            throw DataError("tracks schema mismatch in " + path);
        }
    } catch (const json::exception& e) {
        throw DataError("bad tracks header in " + path + ": " + e.what());
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string kind = j.at("kind").get<std::string>();
            if (kind == "track") {
                const auto idx = j.at("track").get<std::size_t>();
                if (idx != out.tracks.size()) throw DataError("track indices out of order");
                TargetTrack t;
                t.spec.cls = class_from_code(j.at("label").get<int>());
                t.spec.width_m = j.at("w").get<double>();
                t.spec.length_m = j.at("l").get<double>();
                t.spec.height_m = j.at("h").get<double>();
                out.tracks.push_back(std::move(t));
            } else if (kind == "fix") {
                const auto idx = j.at("track").get<std::size_t>();
                if (idx >= out.tracks.size()) throw DataError("fix references unknown track");
                out.tracks[idx].fixes.push_back(
                    {j.at("t").get<double>(),
                     {j.at("x").get<double>(), j.at("y").get<double>(), j.at("z").get<double>()}});
            } else if (kind == "pose") {
                Pose p;
                p.position = {j.at("x").get<double>(), j.at("y").get<double>(),
                              j.at("z").get<double>()};
                p.yaw = j.at("yaw").get<double>();
                out.sensor_poses.emplace_back(j.at("t").get<double>(), p);
            } else {
                throw DataError("unknown line kind: " + kind);
            }
        } catch (const json::exception& e) {
            throw DataError(path + ":" + std::to_string(lineno) + ": bad tracks line: " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// binary helpers
// ---------------------------------------------------------------------------

namespace {

void put_bytes(std::string& out, const void* p, std::size_t n) {
    out.append(static_cast<const char*>(p), n);
}

template <typename T>
void put_pod(std::string& out, T v) {
    put_bytes(out, &v, sizeof(T));
}

class ByteReader {
public:
    ByteReader(const std::string& data, std::string path)
        : data_(data), path_(std::move(path)) {}

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > data_.size()) throw DataError("truncated file: " + path_);
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    void get_raw(void* dst, std::size_t n) {
        if (pos_ + n > data_.size()) throw DataError("truncated file: " + path_);
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }

    std::string get_string(std::size_t n) {
        if (pos_ + n > data_.size()) throw DataError("truncated file: " + path_);
        std::string s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    bool done() const { return pos_ == data_.size(); }

private:
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// samples archive
// ---------------------------------------------------------------------------

void write_samples(const std::string& path, std::span<const Sample> samples, double tf,
                   std::uint64_t config_hash) {
    std::string out;
    out.reserve(64 + samples.size() * (8 + 256 * 21));
    out += "RSEGSMP1";
    put_pod<std::uint32_t>(out, 1);
    const std::uint32_t pc = samples.empty() ? 0 : static_cast<std::uint32_t>(samples[0].pc());
    put_pod<std::uint32_t>(out, pc);
    put_pod<std::uint32_t>(out, kSampleFeatures);
    put_pod<std::uint64_t>(out, samples.size());
    put_pod<double>(out, tf);
    put_pod<std::uint64_t>(out, config_hash);
    for (const Sample& s : samples) {
        if (static_cast<std::uint32_t>(s.pc()) != pc) {
            throw DataError("write_samples: inconsistent point counts");
        }
        put_pod<double>(out, s.frame_start);
        put_bytes(out, s.points.data(), sizeof(float) * static_cast<std::size_t>(s.points.size()));
        put_bytes(out, s.labels.data(), s.labels.size());
    }
    write_file(path, out);
}

SamplesFile read_samples(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);
    if (r.get_string(8) != "RSEGSMP1") throw DataError("bad samples magic in " + path);
    const auto version = r.get<std::uint32_t>();
    if (version != 1) {
        throw DataError("samples schema version mismatch in " + path + ": v" +
                        std::to_string(version));
    }
    const auto pc = r.get<std::uint32_t>();
    const auto features = r.get<std::uint32_t>();
    if (features != kSampleFeatures) throw DataError("unexpected feature count in " + path);
    const auto count = r.get<std::uint64_t>();
    SamplesFile out;
    out.tf = r.get<double>();
    out.config_hash = r.get<std::uint64_t>();
    out.samples.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Sample s;
        s.tf = out.tf;
        s.frame_start = r.get<double>();
        s.points.reset({static_cast<std::int64_t>(pc), kSampleFeatures});
        r.get_raw(s.points.data(), sizeof(float) * static_cast<std::size_t>(s.points.size()));
        s.labels.resize(pc);
        r.get_raw(s.labels.data(), s.labels.size());
        out.samples.push_back(std::move(s));
    }
    if (!r.done()) throw DataError("trailing bytes in " + path);
    return out;
}

// ---------------------------------------------------------------------------
// checkpoint
// ---------------------------------------------------------------------------

void save_checkpoint(const std::string& path, const Model& model, std::uint64_t config_hash) {
    std::string out;
    out += "RSEGCKP1";
    put_pod<std::uint32_t>(out, 1);
    const NetworkConfig& cfg = model.config;
    put_pod<std::uint8_t>(out, static_cast<std::uint8_t>(cfg.variant));
    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.input_features));
    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.num_classes));
    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.pc));
    for (int w : cfg.mlp1) put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    for (int w : cfg.mlp2) put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    for (int w : cfg.head) put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    for (int w : cfg.tnet_conv) put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    for (int w : cfg.tnet_fc) put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
    put_pod<std::uint64_t>(out, config_hash);

    auto params = const_cast<Model&>(model).params();
    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const auto* p : params) {
        put_pod<std::uint16_t>(out, static_cast<std::uint16_t>(p->name.size()));
        out += p->name;
        put_pod<std::uint8_t>(out, static_cast<std::uint8_t>(p->value.ndim()));
        for (int d = 0; d < p->value.ndim(); ++d) {
            put_pod<std::uint64_t>(out, static_cast<std::uint64_t>(p->value.dim(d)));
        }
        put_bytes(out, p->value.data(), sizeof(float) * static_cast<std::size_t>(p->value.size()));
    }

    put_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.history.size()));
    for (const auto& h : model.history) {
        put_pod<std::int32_t>(out, h.epoch);
        put_pod<double>(out, h.train_loss);
        put_pod<double>(out, h.train_reg);
        put_pod<double>(out, h.val_loss);
        put_pod<double>(out, h.val_accuracy);
        put_pod<double>(out, h.best_val_loss);
    }
    write_file(path, out);
}

CheckpointFile load_checkpoint(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);
    if (r.get_string(8) != "RSEGCKP1") throw DataError("bad checkpoint magic in " + path);
    const auto version = r.get<std::uint32_t>();
    if (version != 1) {
        throw DataError("checkpoint schema version mismatch in " + path + ": v" +
                        std::to_string(version));
    }
    NetworkConfig cfg;
    cfg.variant = static_cast<Variant>(r.get<std::uint8_t>());
    cfg.input_features = static_cast<int>(r.get<std::uint32_t>());
    cfg.num_classes = static_cast<int>(r.get<std::uint32_t>());
    cfg.pc = static_cast<int>(r.get<std::uint32_t>());
    for (int& w : cfg.mlp1) w = static_cast<int>(r.get<std::uint32_t>());
    for (int& w : cfg.mlp2) w = static_cast<int>(r.get<std::uint32_t>());
    for (int& w : cfg.head) w = static_cast<int>(r.get<std::uint32_t>());
    for (int& w : cfg.tnet_conv) w = static_cast<int>(r.get<std::uint32_t>());
    for (int& w : cfg.tnet_fc) w = static_cast<int>(r.get<std::uint32_t>());

    CheckpointFile out{build_model<float>(cfg, 0), r.get<std::uint64_t>()};
    auto params = out.model.params();
    const auto n_tensors = r.get<std::uint32_t>();
    if (n_tensors != params.size()) {
        throw DataError("checkpoint parameter count mismatch in " + path);
    }
    for (auto* p : params) {
        const auto name_len = r.get<std::uint16_t>();
        const std::string name = r.get_string(name_len);
        if (name != p->name) {
            throw DataError("checkpoint parameter order mismatch: expected " + p->name + ", found " +
                            name);
        }
        const auto ndim = r.get<std::uint8_t>();
        std::vector<std::int64_t> dims;
        for (int d = 0; d < ndim; ++d) dims.push_back(static_cast<std::int64_t>(r.get<std::uint64_t>()));
        if (dims != p->value.shape()) throw DataError("checkpoint shape mismatch for " + name);
        r.get_raw(p->value.data(), sizeof(float) * static_cast<std::size_t>(p->value.size()));
    }
    const auto n_history = r.get<std::uint32_t>();
    for (std::uint32_t i = 0; i < n_history; ++i) {
        EpochStatsT<float> h;
        h.epoch = r.get<std::int32_t>();
        h.train_loss = r.get<double>();
        h.train_reg = r.get<double>();
        h.val_loss = r.get<double>();
        h.val_accuracy = r.get<double>();
        h.best_val_loss = r.get<double>();
        out.model.history.push_back(h);
    }
    if (!r.done()) throw DataError("trailing bytes in " + path);
    return out;
}

std::string history_csv(const Model& model, std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# schema=radarseg.history.v1 config=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    std::string out = buf;
    out += "epoch,train_loss,train_reg,val_loss,val_accuracy,best_val_loss\n";
    for (const auto& h : model.history) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", h.epoch, h.train_loss,
                      h.train_reg, h.val_loss, h.val_accuracy, h.best_val_loss);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// recipes
// ---------------------------------------------------------------------------

namespace {

std::string waypoints_to_string(const std::vector<Waypoint>& wps) {
    std::string out;
    char buf[160];
    for (std::size_t i = 0; i < wps.size(); ++i) {
        if (i) out += "; ";
        std::snprintf(buf, sizeof(buf), "%.12g:%.12g:%.12g:%.12g", wps[i].t, wps[i].position.x,
                      wps[i].position.y, wps[i].position.z);
        out += buf;
    }
    return out;
}

std::vector<double> split_numbers(const std::string& s, char sep) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        if (part.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(part));
    }
    return out;
}

std::vector<Waypoint> waypoints_from_string(const std::string& s) {
    std::vector<Waypoint> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ';')) {
        if (part.find_first_not_of(" \t") == std::string::npos) continue;
        const auto nums = split_numbers(part, ':');
        if (nums.size() != 4) throw ConfigError("waypoint needs t:x:y:z, got '" + part + "'");
        out.push_back({nums[0], {nums[1], nums[2], nums[3]}});
    }
    return out;
}

}  // namespace

FlatConfig recipe_to_config(const SceneRecipe& r) {
    FlatConfig c;
    c.set_double("scene.duration_s", r.duration_s);
    c.set_int("scene.seed", static_cast<std::int64_t>(r.seed));
    c.set_double("station.lat", r.station.lat_deg);
    c.set_double("station.lon", r.station.lon_deg);
    c.set_double("station.alt", r.station.alt_m);
    c.set("sensor.waypoints", waypoints_to_string(r.sensor.trajectory.waypoints));
    {
        std::string yaw;
        char buf[80];
        for (std::size_t i = 0; i < r.sensor.yaw_schedule.size(); ++i) {
            if (i) yaw += "; ";
            std::snprintf(buf, sizeof(buf), "%.12g:%.12g", r.sensor.yaw_schedule[i].t,
                          rad2deg(r.sensor.yaw_schedule[i].yaw));
            yaw += buf;
        }
        c.set("sensor.yaw_deg", yaw);
    }
    c.set_double("sensor.fov_h_deg", rad2deg(r.sensor.fov_horizontal));
    c.set_double("sensor.fov_v_deg", rad2deg(r.sensor.fov_vertical));
    c.set_double("sensor.noise.range_m", r.sensor.noise.range_err_m);
    c.set_double("sensor.noise.az_deg", rad2deg(r.sensor.noise.azimuth_err_rad));
    c.set_double("sensor.noise.el_deg", rad2deg(r.sensor.noise.elevation_err_rad));
    c.set("ground.enabled", r.ground.enabled ? "true" : "false");
    c.set_double("ground.rate_hz", r.ground.rate_hz);
    c.set_double("ground.max_range_m", r.ground.max_range_m);
    c.set_double("ground.rcs_mean", r.ground.rcs_mean_dbsm);
    c.set_double("ground.rcs_spread", r.ground.rcs_spread_dbsm);
    c.set_double("ground.z_sigma_m", r.ground.z_sigma_m);
    c.set_int("infra.count", static_cast<std::int64_t>(r.infrastructure.size()));
    for (std::size_t i = 0; i < r.infrastructure.size(); ++i) {
        const InfraBox& b = r.infrastructure[i];
        const std::string p = "infra." + std::to_string(i) + ".";
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%.12g:%.12g:%.12g:%.12g:%.12g:%.12g", b.min_corner.x,
                      b.min_corner.y, b.min_corner.z, b.max_corner.x, b.max_corner.y,
                      b.max_corner.z);
        c.set(p + "box", buf);
        c.set_double(p + "rate_hz", b.rate_hz);
        c.set_double(p + "max_range_m", b.max_range_m);
        c.set_double(p + "rcs_mean", b.rcs_mean_dbsm);
        c.set_double(p + "rcs_spread", b.rcs_spread_dbsm);
    }
    c.set_int("actor.count", static_cast<std::int64_t>(r.actors.size()));
    for (std::size_t i = 0; i < r.actors.size(); ++i) {
        const Actor& a = r.actors[i];
        const std::string p = "actor." + std::to_string(i) + ".";
        c.set(p + "class", class_name(a.profile.spec.cls));
        c.set(p + "pattern", pattern_name(a.mission.pattern));
        c.set(p + "waypoints", waypoints_to_string(a.mission.waypoints));
        char buf[200];
        std::snprintf(buf, sizeof(buf), "%.12g:%.12g:%.12g", a.profile.spec.width_m,
                      a.profile.spec.length_m, a.profile.spec.height_m);
        c.set(p + "dims", buf);
        std::snprintf(buf, sizeof(buf), "%.12g:%.12g:%.12g:%.12g:%.12g",
                      a.profile.coverage.max_range_m, rad2deg(a.profile.coverage.azimuth_half_angle),
                      rad2deg(a.profile.coverage.elevation_half_angle),
                      a.profile.coverage.peak_offset_range_m, a.profile.coverage.near_field_taper);
        c.set(p + "coverage", buf);
        c.set_double(p + "rcs_mean", a.profile.rcs_mean_dbsm);
        c.set_double(p + "rcs_spread", a.profile.rcs_spread_dbsm);
        c.set_double(p + "rate_hz", a.profile.return_rate_hz);
        c.set_double(p + "max_speed", a.profile.max_speed_mps);
    }
    return c;
}

SceneRecipe recipe_from_config(const FlatConfig& c) {
    SceneRecipe r;
    r.duration_s = c.get_double("scene.duration_s", 0.0);
    r.seed = static_cast<std::uint64_t>(c.get_int("scene.seed", 0));
    r.station.lat_deg = c.get_double("station.lat", 0.0);
    r.station.lon_deg = c.get_double("station.lon", 0.0);
    r.station.alt_m = c.get_double("station.alt", 0.0);
    r.sensor.trajectory.waypoints = waypoints_from_string(c.get_string("sensor.waypoints", ""));
    {
        std::stringstream ss(c.get_string("sensor.yaw_deg", ""));
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (part.find_first_not_of(" \t") == std::string::npos) continue;
            const auto nums = split_numbers(part, ':');
            if (nums.size() != 2) throw ConfigError("yaw key needs t:deg");
            r.sensor.yaw_schedule.push_back({nums[0], normalize_angle(deg2rad(nums[1]))});
        }
    }
    r.sensor.fov_horizontal = deg2rad(c.get_double("sensor.fov_h_deg", 120.0));
    r.sensor.fov_vertical = deg2rad(c.get_double("sensor.fov_v_deg", 25.0));
    r.sensor.noise.range_err_m = c.get_double("sensor.noise.range_m", 0.5);
    r.sensor.noise.azimuth_err_rad = deg2rad(c.get_double("sensor.noise.az_deg", 1.0));
    r.sensor.noise.elevation_err_rad = deg2rad(c.get_double("sensor.noise.el_deg", 1.0));
    r.ground.enabled = c.get_bool("ground.enabled", false);
    r.ground.rate_hz = c.get_double("ground.rate_hz", 0.0);
    r.ground.max_range_m = c.get_double("ground.max_range_m", 150.0);
    r.ground.rcs_mean_dbsm = c.get_double("ground.rcs_mean", -6.0);
    r.ground.rcs_spread_dbsm = c.get_double("ground.rcs_spread", 5.0);
    r.ground.z_sigma_m = c.get_double("ground.z_sigma_m", 0.35);
    const auto n_infra = c.get_int("infra.count", 0);
    for (std::int64_t i = 0; i < n_infra; ++i) {
        const std::string p = "infra." + std::to_string(i) + ".";
        InfraBox b;
        const auto nums = split_numbers(c.require_string(p + "box"), ':');
        if (nums.size() != 6) throw ConfigError(p + "box needs 6 numbers");
        b.min_corner = {nums[0], nums[1], nums[2]};
        b.max_corner = {nums[3], nums[4], nums[5]};
        b.rate_hz = c.get_double(p + "rate_hz", 0.0);
        b.max_range_m = c.get_double(p + "max_range_m", 120.0);
        b.rcs_mean_dbsm = c.get_double(p + "rcs_mean", 2.0);
        b.rcs_spread_dbsm = c.get_double(p + "rcs_spread", 6.0);
        r.infrastructure.push_back(b);
    }
    const auto n_actors = c.get_int("actor.count", 0);
    for (std::int64_t i = 0; i < n_actors; ++i) {
        const std::string p = "actor." + std::to_string(i) + ".";
        Actor a;
        a.profile = default_profile(class_from_name(c.require_string(p + "class")));
        a.mission.pattern = pattern_from_name(c.get_string(p + "pattern", "manual"));
        a.mission.waypoints = waypoints_from_string(c.require_string(p + "waypoints"));
        if (c.has(p + "dims")) {
            const auto d = split_numbers(c.require_string(p + "dims"), ':');
            if (d.size() != 3) throw ConfigError(p + "dims needs w:l:h");
            a.profile.spec.width_m = d[0];
            a.profile.spec.length_m = d[1];
            a.profile.spec.height_m = d[2];
        }
        if (c.has(p + "coverage")) {
            const auto v = split_numbers(c.require_string(p + "coverage"), ':');
            if (v.size() != 5) throw ConfigError(p + "coverage needs 5 numbers");
            a.profile.coverage = {v[0], deg2rad(v[1]), deg2rad(v[2]), v[3], v[4]};
        }
        a.profile.rcs_mean_dbsm = c.get_double(p + "rcs_mean", a.profile.rcs_mean_dbsm);
        a.profile.rcs_spread_dbsm = c.get_double(p + "rcs_spread", a.profile.rcs_spread_dbsm);
        a.profile.return_rate_hz = c.get_double(p + "rate_hz", a.profile.return_rate_hz);
        a.profile.max_speed_mps = c.get_double(p + "max_speed", a.profile.max_speed_mps);
        r.actors.push_back(std::move(a));
    }
    return r;
}

}  // namespace radarseg
