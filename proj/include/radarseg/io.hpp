// File formats.
//
//   dataset (.jsonl)     one return per line; first line is a header object
//                        {"schema":"radarseg.dataset.v1","seed":...,"config":...}.
//                        Keys: t, r, az, el, x, y, z, doppler, rcs, label
//                        (label omitted while unlabeled); angles in radians.
//                        A sidecar <path>.manifest.json carries per-class
//                        counts, the seed and the schema version.
//
//   tracks (.jsonl)      GPS truth for the labeling pipeline: track metadata
//                        lines, track fix lines and sensor pose lines.
//
//   samples (.bin)       binary archive of encoded samples: header
//                        (magic "RSEGSMP1", version, pc, feature count,
//                        sample count, tf, config hash), then per sample the
//                        frame start (f64), pc x 5 float32 features and pc
//                        label bytes. Little-endian throughout.
//
//   checkpoint (.bin)    magic "RSEGCKP1", version, network config, config
//                        hash, named parameter tensors (shape + float32
//                        payload), training history.
//
//   recipe (.recipe)     flat key-value scene description (see recipe_to_config).
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "radarseg/config.hpp"
#include "radarseg/dataset.hpp"
#include "radarseg/network.hpp"
#include "radarseg/returns.hpp"
#include "radarseg/simulator.hpp"

namespace radarseg {

inline constexpr std::uint32_t kDatasetSchemaVersion = 1;

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct DatasetHeader {
    std::uint32_t schema_version = kDatasetSchemaVersion;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
};

void write_dataset_jsonl(const std::string& path, std::span<const RadarReturn> returns,
                         const DatasetHeader& header);

struct DatasetFile {
    DatasetHeader header;
    std::vector<RadarReturn> returns;
};

/// Throws DataError on missing file, malformed lines or a schema version
/// mismatch.
DatasetFile read_dataset_jsonl(const std::string& path);

/// Sidecar manifest with per-class counts; written next to the dataset.
void write_dataset_manifest(const std::string& dataset_path,
                            std::span<const RadarReturn> returns, const DatasetHeader& header,
                            double duration_s);

struct TracksFile {
    std::vector<TargetTrack> tracks;
    std::vector<std::pair<double, Pose>> sensor_poses;
};

void write_tracks_jsonl(const std::string& path, const TracksFile& tracks,
                        std::uint64_t config_hash);
TracksFile read_tracks_jsonl(const std::string& path);

void write_samples(const std::string& path, std::span<const Sample> samples, double tf,
                   std::uint64_t config_hash);

struct SamplesFile {
    std::vector<Sample> samples;
    double tf = 0.0;
    std::uint64_t config_hash = 0;
};

SamplesFile read_samples(const std::string& path);

void save_checkpoint(const std::string& path, const Model& model, std::uint64_t config_hash);

struct CheckpointFile {
    Model model;
    std::uint64_t config_hash = 0;
};

CheckpointFile load_checkpoint(const std::string& path);

std::string history_csv(const Model& model, std::uint64_t config_hash);

/// Scene recipe <-> flat config text.
FlatConfig recipe_to_config(const SceneRecipe& recipe);
SceneRecipe recipe_from_config(const FlatConfig& config);

}  // namespace radarseg
