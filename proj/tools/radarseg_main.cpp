// radarseg: airborne radar point cloud segmentation pipeline.
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 correctness-check failure (benchmark implementations disagree).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "radarseg/bench.hpp"
#include "radarseg/pipeline.hpp"

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    radarseg::FlatConfig overrides;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option_function<std::string>(
           "--config", [&flags](const std::string& v) { flags.config_path = v; },
           "flat key-value config file");
    auto key = [&flags](const char* k) {
        return [&flags, k](const std::string& v) { flags.overrides.set(k, v); };
    };
    cmd->add_option_function<std::string>("--seed", key("seed"), "global RNG seed");
    cmd->add_option_function<std::string>("--tf-ms", key("dataset.tf_ms"), "timeframe (ms)");
    cmd->add_option_function<std::string>("--pc", key("dataset.pc"), "points per sample");
    cmd->add_option_function<std::string>("--batch", key("train.batch"), "training batch size");
    cmd->add_option_function<std::string>("--lr", key("train.lr"), "Adam learning rate");
    cmd->add_option_function<std::string>("--epochs", key("train.epochs"), "max training epochs");
    cmd->add_option_function<std::string>("--split", key("dataset.split"), "train fraction");
    cmd->add_option_function<std::string>("--oversample-to", key("dataset.oversample_to"),
                                          "minority point-share target");
    cmd->add_option_function<std::string>("--epsilon-m", key("label.epsilon_m"),
                                          "labeling slack margin (m)");
    cmd->add_option_function<std::string>("--variant", key("network.variant"),
                                          "full|one-tnet|one-tnet-reduced|no-tnet");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"airborne radar point cloud segmentation pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    radarseg::SimulateArgs sim;
    radarseg::LabelArgs label;
    radarseg::EncodeArgs encode;
    radarseg::TrainArgs train;
    radarseg::EvalArgs eval;
    radarseg::BenchArgs bench;

    auto* c_sim = app.add_subcommand("simulate", "generate a labeled synthetic dataset");
    add_common(c_sim, flags);
    c_sim->add_option("--recipe", sim.recipe, "builtin recipe name or .recipe path");
    c_sim->add_option("--out", sim.out, "output dataset .jsonl")->required();
    c_sim->add_option("--tracks-out", sim.tracks_out, "optional GPS-truth sidecar .jsonl");
    c_sim->add_flag("--strip-labels", sim.strip_labels, "emit unlabeled returns");

    auto* c_label = app.add_subcommand("label", "label a dataset from GPS tracks");
    add_common(c_label, flags);
    c_label->add_option("--in", label.in, "input dataset .jsonl")->required();
    c_label->add_option("--tracks", label.tracks, "tracks .jsonl")->required();
    c_label->add_option("--out", label.out, "output dataset .jsonl")->required();
    c_label->add_option("--corridor", label.corridor, "optional corridor config");

    auto* c_encode = app.add_subcommand("encode", "encode a dataset into fixed-size samples");
    add_common(c_encode, flags);
    c_encode->add_option("--in", encode.in, "labeled dataset .jsonl")->required();
    c_encode->add_option("--out", encode.out, "output samples .bin")->required();

    auto* c_train = app.add_subcommand("train", "train a segmentation model");
    add_common(c_train, flags);
    c_train->add_option("--in", train.in, "samples .bin")->required();
    c_train->add_option("--checkpoint-out", train.checkpoint_out, "output checkpoint")->required();
    c_train->add_option("--history-out", train.history_out, "training history CSV");

    auto* c_eval = app.add_subcommand("eval", "evaluate a checkpoint against the baseline");
    add_common(c_eval, flags);
    c_eval->add_option("--in", eval.in, "samples .bin")->required();
    c_eval->add_option("--checkpoint", eval.checkpoint, "model checkpoint")->required();
    c_eval->add_option("--out-dir", eval.out_dir, "report output directory")->required();
    c_eval->add_flag("!--no-baseline", eval.with_baseline, "skip the random-forest baseline");

    auto* c_bench = app.add_subcommand("bench", "micro-benchmark the tensor kernels");
    add_common(c_bench, flags);
    c_bench->add_option("--op", bench.op, "matmul|conv1d|maxpool|softmax|concat|broadcast");
    c_bench->add_option("--shape", bench.shape, "dims like 32x256x64x128");
    c_bench->add_option("--out", bench.out, "output CSV path");
    c_bench->add_option_function<std::string>(
        "--reps", [&flags](const std::string& v) { flags.overrides.set("bench.reps", v); },
        "timed repetitions (>= 10)");

    CLI11_PARSE(app, argc, argv);

    try {
        const radarseg::FlatConfig cfg = radarseg::resolve_config(flags.config_path, flags.overrides);
        if (c_sim->parsed()) radarseg::cmd_simulate(cfg, sim, std::cout);
        if (c_label->parsed()) radarseg::cmd_label(cfg, label, std::cout);
        if (c_encode->parsed()) radarseg::cmd_encode(cfg, encode, std::cout);
        if (c_train->parsed()) radarseg::cmd_train(cfg, train, std::cout);
        if (c_eval->parsed()) radarseg::cmd_eval(cfg, eval, std::cout);
        if (c_bench->parsed()) radarseg::cmd_bench(cfg, bench, std::cout);
    } catch (const radarseg::BenchMismatchError& e) {
        std::cerr << "correctness failure: " << e.what() << "\n";
        return 4;
    } catch (const radarseg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const radarseg::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
