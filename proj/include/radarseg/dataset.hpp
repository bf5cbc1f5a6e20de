// Fixed-size sample encoding and dataset assembly.
//
// A labeled return stream is sliced into timeframes of tf seconds. Each
// non-empty frame becomes one sample of exactly pc points by doppler
// prioritized sampling: the nonzero-doppler points are shuffled, the
// zero-doppler points are shuffled, and the sample takes the first pc
// entries of the cyclic repetition of their concatenation. Consequences:
//   - every moving point is included whenever there are at most pc of them,
//   - frames with fewer than pc points repeat points cyclically,
//   - frames with zero points are skipped entirely (not zero-padded).
//
// Frame encoding is deterministic: each frame's RNG is seeded by
// (global seed, frame index), so results do not depend on processing order.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "radarseg/returns.hpp"
#include "radarseg/tensor.hpp"

namespace radarseg {

inline constexpr int kSampleFeatures = 5;  // (x, y, z, rcs, doppler)
inline constexpr double kDefaultTimeframeS = 0.2;
inline constexpr int kDefaultPointCount = 256;

/// Feature scale constants mapping the characterized envelope to about
/// [-1, 1]: positions / 120 m, RCS / 40 dBsm, doppler / 25 m/s. Plain
/// division preserves exact zeros (static returns, boresight).
inline constexpr std::array<float, kSampleFeatures> kDefaultScales = {120.0f, 120.0f, 120.0f,
                                                                      40.0f, 25.0f};

struct Sample {
    Tensor points;                    ///< pc x 5, feature order (x, y, z, rcs, doppler)
    std::vector<std::uint8_t> labels; ///< pc class codes (0 = unlabeled)
    double frame_start = 0.0;
    double tf = kDefaultTimeframeS;

    std::int64_t pc() const { return points.ndim() == 2 ? points.dim(0) : 0; }
};

/// Encodes the returns of one timeframe window. Returns std::nullopt for an
/// empty frame. Throws ConfigError for pc <= 0.
std::optional<Sample> encode_frame(std::span<const RadarReturn> points, double tf, int pc,
                                   std::uint64_t seed);

/// Slices a time-sorted return stream into tf windows (frame k covers
/// [k*tf, (k+1)*tf)) and encodes every non-empty frame with seed
/// mix_seed(seed, k).
std::vector<Sample> encode_stream(std::span<const RadarReturn> returns, double tf, int pc,
                                  std::uint64_t seed);

/// Divides each feature column by its scale constant. No mean-centering, so
/// zeros stay exactly zero. Throws ConfigError for non-positive scales.
Sample normalize(const Sample& sample, const std::array<float, kSampleFeatures>& scales);
void normalize_inplace(std::vector<Sample>& samples, const std::array<float, kSampleFeatures>& scales);

/// Point counts per class code; index 0 counts unlabeled points.
std::array<std::int64_t, kNumClasses + 1> class_histogram(std::span<const Sample> samples);

struct DatasetSplit {
    std::vector<Sample> train;
    std::vector<Sample> val;
    std::array<std::int64_t, kNumClasses + 1> train_histogram{};
    std::array<std::int64_t, kNumClasses + 1> val_histogram{};
    bool stratified = true;  ///< false when too few minority samples existed
};

/// Duplicates samples containing `cls` (whole frames, original values
/// untouched) until that class reaches `target_point_fraction` of all points.
/// Intended for the training split only. If the class is absent the input is
/// returned unchanged and *warned is set.
std::vector<Sample> oversample_minority(std::vector<Sample> samples, ClassLabel cls,
                                        double target_point_fraction, bool* warned = nullptr);

/// Deterministic stratified split: samples containing airplane points are
/// split separately from the rest so both sides keep minority coverage.
/// Falls back to a plain random split (stratified=false) when fewer than two
/// airplane samples exist. Throws DataError for fewer than 4 samples.
DatasetSplit split_train_val(std::vector<Sample> samples, double ratio, std::uint64_t seed);

/// Flattens samples into one row per point for per-point baselines:
/// features (n_points x 5) and labels (n_points).
void flatten_points(std::span<const Sample> samples, Tensor& features,
                    std::vector<std::uint8_t>& labels);

/// Validates polar/cartesian consistency of a return stream (1e-6 m).
void validate_returns(std::span<const RadarReturn> returns);

}  // namespace radarseg
