#include "radarseg/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "radarseg/bench.hpp"
#include "radarseg/dataset.hpp"
#include "radarseg/eval.hpp"
#include "radarseg/io.hpp"
#include "radarseg/labeling.hpp"
#include "radarseg/network.hpp"
#include "radarseg/simulator.hpp"

namespace radarseg {

namespace {

void print_resolved(const FlatConfig& cfg, const std::string& command, std::ostream& log) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(cfg.hash()));
    log << "[" << command << "] resolved config (hash " << hex << ", seed "
        << cfg.get_int("seed", 0) << "):\n";
    std::istringstream lines(cfg.serialize());
    std::string line;
    while (std::getline(lines, line)) log << "    " << line << "\n";
}

std::uint64_t seed_of(const FlatConfig& cfg) {
    return static_cast<std::uint64_t>(cfg.get_int("seed", 42));
}

std::array<float, kSampleFeatures> scales_of(const FlatConfig& cfg) {
    const auto v = cfg.get_doubles("dataset.scales");
    if (v.empty()) return kDefaultScales;
    if (v.size() != kSampleFeatures) {
        throw ConfigError("dataset.scales needs " + std::to_string(kSampleFeatures) + " values");
    }
    std::array<float, kSampleFeatures> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(v[i]);
    return out;
}

NetworkConfig network_config_of(const FlatConfig& cfg) {
    NetworkConfig nc;
    nc.variant = variant_from_name(cfg.get_string("network.variant", "one-tnet"));
    nc.pc = static_cast<int>(cfg.get_int("dataset.pc", kDefaultPointCount));
    return nc;
}

/// The deterministic split both cmd_train and cmd_eval derive (same config +
/// seed => identical split on both sides).
DatasetSplit derive_split(const FlatConfig& cfg, std::vector<Sample> samples, std::ostream& log) {
    const double ratio = cfg.get_double("dataset.split", 0.75);
    DatasetSplit split = split_train_val(std::move(samples), ratio, mix_seed(seed_of(cfg), fnv1a("split")));
    if (!split.stratified) {
        log << "warning: too few airplane samples to stratify; plain random split used\n";
    }
    const ClassLabel cls = class_from_name(cfg.get_string("dataset.oversample_class", "airplane"));
    const double target = cfg.get_double("dataset.oversample_to", 0.02);
    bool warned = false;
    split.train = oversample_minority(std::move(split.train), cls, target, &warned);
    if (warned) {
        log << "warning: oversampling target for " << class_name(cls)
            << " could not be met (class absent or saturated)\n";
    }
    split.train_histogram = class_histogram(split.train);
    return split;
}

Pose pose_at_time(const std::vector<std::pair<double, Pose>>& poses, double t) {
    if (poses.empty()) throw DataError("tracks file carries no sensor poses");
    if (t <= poses.front().first) return poses.front().second;
    if (t >= poses.back().first) return poses.back().second;
    auto it = std::lower_bound(poses.begin(), poses.end(), t,
                               [](const auto& a, double v) { return a.first < v; });
    const auto& [t1, p1] = *it;
    const auto& [t0, p0] = *(it - 1);
    if (t1 == t) return p1;
    const double u = (t - t0) / (t1 - t0);
    Pose out;
    out.position = p0.position + (p1.position - p0.position) * u;
    out.yaw = normalize_angle(p0.yaw + normalize_angle(p1.yaw - p0.yaw) * u);
    return out;
}

}  // namespace

FlatConfig default_run_config() {
    FlatConfig c;
    c.set_int("seed", 42);
    c.set_int("dataset.tf_ms", 200);
    c.set_int("dataset.pc", kDefaultPointCount);
    c.set("dataset.scales", "120,120,120,40,25");
    c.set_double("dataset.split", 0.75);
    c.set_double("dataset.oversample_to", 0.02);
    c.set("dataset.oversample_class", "airplane");
    c.set_double("label.epsilon_m", 1.5);
    c.set("label.unmatched", "ground");
    c.set("network.variant", "one-tnet");
    c.set_int("train.batch", 32);
    c.set_double("train.lr", 1e-3);
    c.set_double("train.beta1", 0.9);
    c.set_double("train.beta2", 0.999);
    c.set_double("train.eps", 1e-8);
    c.set_int("train.epochs", 100);
    c.set_int("train.patience", 10);
    c.set_double("train.min_delta", 1e-4);
    c.set_double("train.reg_weight", 1e-3);
    c.set_double("train.stop_accuracy", -1);
    c.set_int("forest.trees", 100);
    c.set_int("forest.depth", 12);
    c.set_int("forest.min_leaf", 5);
    c.set_double("forest.feature_fraction", 0.45);
    c.set_int("bench.reps", 25);
    return c;
}

FlatConfig resolve_config(const std::optional<std::string>& config_path,
                          const FlatConfig& overrides) {
    FlatConfig resolved = default_run_config();
    if (config_path) {
        for (const auto& [k, v] : FlatConfig::load(*config_path).values()) resolved.set(k, v);
    }
    for (const auto& [k, v] : overrides.values()) resolved.set(k, v);
    return resolved;
}

void cmd_simulate(const FlatConfig& cfg, const SimulateArgs& args, std::ostream& log) {
    print_resolved(cfg, "simulate", log);
    const std::uint64_t seed = seed_of(cfg);

    SceneRecipe recipe;
    if (is_builtin_recipe(args.recipe)) {
        recipe = builtin_recipe(args.recipe, seed);
    } else {
        recipe = recipe_from_config(FlatConfig::load(args.recipe));
        recipe.seed = seed;  // the CLI seed always overrides the recipe's
    }
    validate_recipe(recipe);

    std::vector<RadarReturn> returns;
    if (recipe.duration_s == 0.0) {
        log << "warning: zero-duration recipe, writing an empty dataset\n";
    } else {
        returns = simulate(recipe);
    }
    if (args.strip_labels) {
        for (auto& r : returns) r.label.reset();
    }

    DatasetHeader header;
    header.seed = seed;
    header.config_hash = cfg.hash();
    write_dataset_jsonl(args.out, returns, header);
    write_dataset_manifest(args.out, returns, header, recipe.duration_s);

    if (!args.tracks_out.empty()) {
        TracksFile tf;
        tf.tracks = actor_tracks(recipe);
        tf.sensor_poses = sensor_pose_track(recipe);
        write_tracks_jsonl(args.tracks_out, tf, cfg.hash());
    }

    std::array<std::int64_t, kNumClasses + 1> counts{};
    for (const auto& r : returns) counts[r.label ? static_cast<int>(*r.label) : 0] += 1;
    log << "simulated " << returns.size() << " returns over " << recipe.duration_s << " s\n";
    for (int cix = 1; cix <= kNumClasses; ++cix) {
        log << "  " << class_name(static_cast<ClassLabel>(cix)) << ": "
            << counts[static_cast<std::size_t>(cix)] << "\n";
    }
}

void cmd_label(const FlatConfig& cfg, const LabelArgs& args, std::ostream& log) {
    print_resolved(cfg, "label", log);

    DatasetFile dataset = read_dataset_jsonl(args.in);
    const TracksFile tracks = read_tracks_jsonl(args.tracks);

    SensorErrorModel err;
    err.slack_m = cfg.get_double("label.epsilon_m", 1.5);

    const std::string unmatched = cfg.get_string("label.unmatched", "ground");
    if (unmatched != "ground" && unmatched != "infrastructure" && unmatched != "drop" &&
        unmatched != "keep") {
        throw ConfigError("label.unmatched must be ground|infrastructure|drop|keep");
    }

    std::vector<RadarReturn> labeled;
    labeled.reserve(dataset.returns.size());
    std::size_t matched = 0;
    for (RadarReturn r : dataset.returns) {
        const Pose pose = pose_at_time(tracks.sensor_poses, r.t);
        const auto label = label_return(r, pose, tracks.tracks, err);
        if (label) {
            r.label = label;
            ++matched;
        } else if (unmatched == "ground") {
            r.label = ClassLabel::Ground;
        } else if (unmatched == "infrastructure") {
            r.label = ClassLabel::Infrastructure;
        } else if (unmatched == "drop") {
            continue;
        }  // "keep": leave unlabeled
        labeled.push_back(r);
    }

    if (!args.corridor.empty()) {
        const FlatConfig cc = FlatConfig::load(args.corridor);
        Corridor corridor;
        std::stringstream ss(cc.require_string("corridor.polygon"));
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (part.find_first_not_of(" \t") == std::string::npos) continue;
            std::stringstream ps(part);
            std::string a, b;
            if (!std::getline(ps, a, ':') || !std::getline(ps, b, ':')) {
                throw ConfigError("corridor.polygon needs x:y pairs");
            }
            corridor.polygon.push_back({std::stod(a), std::stod(b)});
        }
        corridor.z_min = cc.get_double("corridor.z_min", -1e9);
        corridor.z_max = cc.get_double("corridor.z_max", 1e9);
        const ClassLabel cls = class_from_name(cc.get_string("corridor.class", "airplane"));
        std::vector<Pose> poses;
        poses.reserve(labeled.size());
        for (const auto& r : labeled) poses.push_back(pose_at_time(tracks.sensor_poses, r.t));
        label_corridor(labeled, poses, corridor, cls);
    }

    DatasetHeader header = dataset.header;
    header.config_hash = cfg.hash();
    write_dataset_jsonl(args.out, labeled, header);
    write_dataset_manifest(args.out, labeled, header,
                           labeled.empty() ? 0.0 : labeled.back().t);
    log << "labeled " << labeled.size() << " returns (" << matched << " track-matched, policy '"
        << unmatched << "' for the rest)\n";
}

void cmd_encode(const FlatConfig& cfg, const EncodeArgs& args, std::ostream& log) {
    print_resolved(cfg, "encode", log);
    DatasetFile dataset = read_dataset_jsonl(args.in);
    validate_returns(dataset.returns);

    const double tf = static_cast<double>(cfg.get_int("dataset.tf_ms", 200)) / 1000.0;
    const int pc = static_cast<int>(cfg.get_int("dataset.pc", kDefaultPointCount));
    const auto samples = encode_stream(dataset.returns, tf, pc, seed_of(cfg));
    write_samples(args.out, samples, tf, cfg.hash());
    log << "encoded " << samples.size() << " samples (tf " << tf * 1000.0 << " ms, pc " << pc
        << ") from " << dataset.returns.size() << " returns\n";
}

void cmd_train(const FlatConfig& cfg, const TrainArgs& args, std::ostream& log) {
    print_resolved(cfg, "train", log);
    SamplesFile file = read_samples(args.in);
    if (file.samples.empty()) throw DataError("no samples in " + args.in);

    const int pc = static_cast<int>(cfg.get_int("dataset.pc", kDefaultPointCount));
    if (file.samples[0].pc() != pc) {
        throw ConfigError("sample archive pc " + std::to_string(file.samples[0].pc()) +
                          " does not match configured pc " + std::to_string(pc));
    }

    normalize_inplace(file.samples, scales_of(cfg));
    DatasetSplit split = derive_split(cfg, std::move(file.samples), log);
    log << "split: " << split.train.size() << " train / " << split.val.size()
        << " val samples (after oversampling)\n";

    TrainOptions opt;
    opt.adam.lr = cfg.get_double("train.lr", 1e-3);
    opt.adam.beta1 = cfg.get_double("train.beta1", 0.9);
    opt.adam.beta2 = cfg.get_double("train.beta2", 0.999);
    opt.adam.eps = cfg.get_double("train.eps", 1e-8);
    opt.batch = static_cast<int>(cfg.get_int("train.batch", 32));
    opt.max_epochs = static_cast<int>(cfg.get_int("train.epochs", 100));
    opt.patience = static_cast<int>(cfg.get_int("train.patience", 10));
    opt.min_delta = cfg.get_double("train.min_delta", 1e-4);
    opt.reg_weight = cfg.get_double("train.reg_weight", 1e-3);
    opt.stop_val_accuracy = cfg.get_double("train.stop_accuracy", -1.0);
    opt.verbose = true;

    const Model model = train(network_config_of(cfg), split, opt, mix_seed(seed_of(cfg), fnv1a("train")));

    save_checkpoint(args.checkpoint_out, model, cfg.hash());
    if (!args.history_out.empty()) write_file(args.history_out, history_csv(model, cfg.hash()));
    if (!model.history.empty()) {
        const auto& last = model.history.back();
        log << "trained " << variant_name(model.config.variant) << " for " << last.epoch
            << " epochs; final val loss " << last.val_loss << ", val accuracy " << last.val_accuracy
            << "\n";
    }
}

void cmd_eval(const FlatConfig& cfg, const EvalArgs& args, std::ostream& log) {
    print_resolved(cfg, "eval", log);
    SamplesFile file = read_samples(args.in);
    if (file.samples.empty()) throw DataError("no samples in " + args.in);
    CheckpointFile ckpt = load_checkpoint(args.checkpoint);
    if (ckpt.model.config.pc != static_cast<int>(file.samples[0].pc())) {
        throw DataError("checkpoint pc does not match sample archive");
    }

    // Same deterministic split the training command used. The network sees
    // normalized samples; the baseline sees the raw per-point features.
    std::vector<Sample> raw = file.samples;
    normalize_inplace(file.samples, scales_of(cfg));
    DatasetSplit split = derive_split(cfg, std::move(file.samples), log);
    DatasetSplit raw_split = derive_split(cfg, std::move(raw), log);

    std::filesystem::create_directories(args.out_dir);
    std::vector<std::pair<std::string, MetricsReport>> reports;

    Tensor net_features;
    std::vector<std::uint8_t> val_labels;
    flatten_points(split.val, net_features, val_labels);

    const auto net_pred_rows = predict_batch(ckpt.model, split.val);
    std::vector<std::uint8_t> net_preds;
    net_preds.reserve(val_labels.size());
    for (const auto& p : net_pred_rows) net_preds.insert(net_preds.end(), p.begin(), p.end());
    const ConfusionMatrix net_cm = confusion(net_preds, val_labels);
    const MetricsReport net_report = metrics(net_cm);
    reports.emplace_back("pointnet-" + std::string(variant_name(ckpt.model.config.variant)),
                         net_report);
    log << metrics_table("network (" + std::string(variant_name(ckpt.model.config.variant)) + ")",
                         net_report);
    write_file(args.out_dir + "/confusion_network.csv", confusion_csv(net_cm, cfg.hash()));

    if (args.with_baseline) {
        ForestConfig fc;
        fc.n_trees = static_cast<int>(cfg.get_int("forest.trees", 100));
        fc.max_depth = static_cast<int>(cfg.get_int("forest.depth", 12));
        fc.min_leaf = static_cast<int>(cfg.get_int("forest.min_leaf", 5));
        fc.feature_fraction = cfg.get_double("forest.feature_fraction", 0.45);
        fc.seed = mix_seed(seed_of(cfg), fnv1a("forest"));

        Tensor train_features;
        std::vector<std::uint8_t> train_labels;
        flatten_points(raw_split.train, train_features, train_labels);
        const Forest forest = train_forest(train_features, train_labels, fc);

        Tensor raw_val_features;
        std::vector<std::uint8_t> raw_val_labels;
        flatten_points(raw_split.val, raw_val_features, raw_val_labels);
        const auto forest_preds = forest.predict_batch(raw_val_features);
        const ConfusionMatrix forest_cm = confusion(forest_preds, raw_val_labels);
        const MetricsReport forest_report = metrics(forest_cm);
        reports.emplace_back("random-forest", forest_report);
        log << metrics_table("random forest baseline", forest_report);
        write_file(args.out_dir + "/confusion_forest.csv", confusion_csv(forest_cm, cfg.hash()));
        log << "accuracy delta (network - forest): "
            << net_report.overall_accuracy - forest_report.overall_accuracy << "\n";
    }

    write_file(args.out_dir + "/metrics.csv", metrics_csv(reports, cfg.hash()));
}

void cmd_bench(const FlatConfig& cfg, const BenchArgs& args, std::ostream& log) {
    print_resolved(cfg, "bench", log);
    std::vector<std::int64_t> shape;
    if (args.shape.empty()) {
        if (args.op == "matmul") shape = {8192, 64, 128};
        else if (args.op == "conv1d") shape = {32, 256, 64, 128};
        else if (args.op == "concat") shape = {32, 256, 64, 1024};
        else shape = {32, 256, 1024};
    } else {
        std::stringstream ss(args.shape);
        std::string part;
        while (std::getline(ss, part, 'x')) shape.push_back(std::stoll(part));
    }
    const int reps = static_cast<int>(cfg.get_int("bench.reps", 25));
    const auto reports = run_bench(args.op, shape, reps, seed_of(cfg));
    const std::string csv = bench_csv(reports, cfg.hash());
    if (!args.out.empty()) write_file(args.out, csv);
    log << csv;
}

}  // namespace radarseg
