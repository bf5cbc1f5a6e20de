// Pipeline commands behind the CLI: simulate -> label -> encode -> train ->
// eval, plus the operator benchmark. Each command resolves its configuration
// (defaults + config file + flag overrides), prints it with the seed, and
// stamps the config hash into every artifact it writes.
//
// Commands throw ConfigError (exit 2), DataError (exit 3) or
// BenchMismatchError (exit 4); the CLI maps them to exit codes.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "radarseg/config.hpp"

namespace radarseg {

/// All configuration keys with their default values; file and flag values
/// override these.
FlatConfig default_run_config();

/// defaults <- file (if any) <- overrides, in increasing priority.
FlatConfig resolve_config(const std::optional<std::string>& config_path,
                          const FlatConfig& overrides);

struct SimulateArgs {
    std::string recipe = "campaign";  ///< builtin name or path to a .recipe file
    std::string out;                  ///< dataset .jsonl path
    std::string tracks_out;           ///< optional GPS-truth sidecar
    bool strip_labels = false;        ///< emit an unlabeled dataset (for cmd_label demos)
};

void cmd_simulate(const FlatConfig& cfg, const SimulateArgs& args, std::ostream& log);

struct LabelArgs {
    std::string in;
    std::string tracks;
    std::string out;
    std::string corridor;  ///< optional corridor config path
};

void cmd_label(const FlatConfig& cfg, const LabelArgs& args, std::ostream& log);

struct EncodeArgs {
    std::string in;
    std::string out;
};

void cmd_encode(const FlatConfig& cfg, const EncodeArgs& args, std::ostream& log);

struct TrainArgs {
    std::string in;
    std::string checkpoint_out;
    std::string history_out;
};

void cmd_train(const FlatConfig& cfg, const TrainArgs& args, std::ostream& log);

struct EvalArgs {
    std::string in;
    std::string checkpoint;
    std::string out_dir;
    bool with_baseline = true;
};

void cmd_eval(const FlatConfig& cfg, const EvalArgs& args, std::ostream& log);

struct BenchArgs {
    std::string op = "conv1d";
    std::string shape;  ///< e.g. "32x256x64x128"; empty = op default
    std::string out;
};

void cmd_bench(const FlatConfig& cfg, const BenchArgs& args, std::ostream& log);

}  // namespace radarseg
