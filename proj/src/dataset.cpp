#include "radarseg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace radarseg {

std::optional<Sample> encode_frame(std::span<const RadarReturn> points, double tf, int pc,
                                   std::uint64_t seed) {
    if (pc <= 0) throw ConfigError("point count must be positive");
    if (points.empty()) return std::nullopt;

    std::vector<std::size_t> moving, stationary;
    for (std::size_t i = 0; i < points.size(); ++i) {
        (points[i].doppler != 0.0 ? moving : stationary).push_back(i);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(moving.begin(), moving.end(), rng);
    std::shuffle(stationary.begin(), stationary.end(), rng);
    moving.insert(moving.end(), stationary.begin(), stationary.end());

    Sample s;
    s.tf = tf;
    s.frame_start = std::floor(points.front().t / tf) * tf;
    s.points.reset({pc, kSampleFeatures});
    s.labels.assign(static_cast<std::size_t>(pc), 0);
    for (int r = 0; r < pc; ++r) {
        const RadarReturn& p = points[moving[static_cast<std::size_t>(r) % moving.size()]];
        s.points(r, 0) = static_cast<float>(p.cartesian.x);
        s.points(r, 1) = static_cast<float>(p.cartesian.y);
        s.points(r, 2) = static_cast<float>(p.cartesian.z);
        s.points(r, 3) = static_cast<float>(p.rcs);
        s.points(r, 4) = static_cast<float>(p.doppler);
        s.labels[static_cast<std::size_t>(r)] =
            p.label ? static_cast<std::uint8_t>(*p.label) : std::uint8_t(0);
    }
    return s;
}

std::vector<Sample> encode_stream(std::span<const RadarReturn> returns, double tf, int pc,
                                  std::uint64_t seed) {
    if (tf <= 0.0) throw ConfigError("timeframe must be positive");
    std::vector<Sample> samples;
    std::size_t i = 0;
    while (i < returns.size()) {
        const auto frame = static_cast<std::int64_t>(std::floor(returns[i].t / tf));
        const double frame_end = (static_cast<double>(frame) + 1.0) * tf;
        std::size_t j = i;
        while (j < returns.size() && returns[j].t < frame_end) ++j;
        auto sample = encode_frame(returns.subspan(i, j - i), tf, pc,
                                   mix_seed(seed, static_cast<std::uint64_t>(frame)));
        if (sample) {
            sample->frame_start = static_cast<double>(frame) * tf;
            samples.push_back(std::move(*sample));
        }
        i = j;
    }
    return samples;
}

Sample normalize(const Sample& sample, const std::array<float, kSampleFeatures>& scales) {
    for (float s : scales) {
        if (!(s > 0.0f)) throw ConfigError("normalization scales must be positive");
    }
    Sample out = sample;
    const std::int64_t n = out.points.dim(0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (int f = 0; f < kSampleFeatures; ++f) {
            out.points(i, f) = sample.points(i, f) / scales[static_cast<std::size_t>(f)];
        }
    }
    return out;
}

void normalize_inplace(std::vector<Sample>& samples, const std::array<float, kSampleFeatures>& scales) {
    for (auto& s : samples) s = normalize(s, scales);
}

std::array<std::int64_t, kNumClasses + 1> class_histogram(std::span<const Sample> samples) {
    std::array<std::int64_t, kNumClasses + 1> hist{};
    for (const auto& s : samples) {
        for (std::uint8_t l : s.labels) {
            hist[l <= kNumClasses ? l : 0] += 1;
        }
    }
    return hist;
}

std::vector<Sample> oversample_minority(std::vector<Sample> samples, ClassLabel cls,
                                        double target_point_fraction, bool* warned) {
    if (warned) *warned = false;
    const auto code = static_cast<std::uint8_t>(cls);
    std::vector<std::size_t> bearing;
    std::int64_t cls_points = 0, total_points = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::int64_t in_sample = 0;
        for (std::uint8_t l : samples[i].labels) {
            if (l == code) ++in_sample;
        }
        total_points += samples[i].pc();
        cls_points += in_sample;
        if (in_sample > 0) bearing.push_back(i);
    }
    if (bearing.empty()) {
        if (warned) *warned = true;
        return samples;
    }
    std::int64_t bearing_points = 0, bearing_cls = 0;
    for (std::size_t i : bearing) {
        bearing_points += samples[i].pc();
        for (std::uint8_t l : samples[i].labels) {
            if (l == code) ++bearing_cls;
        }
    }
    // Each round appends one copy of every minority-bearing frame; the first
    // round that reaches the target stops, keeping the overshoot below one
    // round's worth.
    int rounds = 0;
    while (total_points > 0 &&
           static_cast<double>(cls_points) / static_cast<double>(total_points) <
               target_point_fraction) {
        // Duplicating can never raise the share past the bearing frames' own
        // density; bail out once a round stops helping.
        if (static_cast<double>(bearing_cls) / static_cast<double>(bearing_points) <=
            static_cast<double>(cls_points) / static_cast<double>(total_points)) {
            if (warned) *warned = true;
            break;
        }
        for (std::size_t i : bearing) samples.push_back(samples[i]);
        cls_points += bearing_cls;
        total_points += bearing_points;
        if (++rounds > 10000) throw DataError("oversampling did not converge");
    }
    return samples;
}

DatasetSplit split_train_val(std::vector<Sample> samples, double ratio, std::uint64_t seed) {
    if (samples.size() < 4) throw DataError("split requires at least 4 samples");
    if (ratio <= 0.0 || ratio >= 1.0) throw ConfigError("split ratio must be in (0,1)");

    const auto airplane = static_cast<std::uint8_t>(ClassLabel::Airplane);
    std::vector<std::size_t> minority, rest;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const bool has = std::find(samples[i].labels.begin(), samples[i].labels.end(), airplane) !=
                         samples[i].labels.end();
        (has ? minority : rest).push_back(i);
    }

    DatasetSplit split;
    const auto total_train =
        static_cast<std::size_t>(std::llround(ratio * static_cast<double>(samples.size())));

    std::mt19937_64 rng(mix_seed(seed, 0xd5));
    auto assign = [&](const std::vector<std::size_t>& group, std::size_t n_train) {
        std::vector<std::size_t> order = group;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t k = 0; k < order.size(); ++k) {
            (k < n_train ? split.train : split.val).push_back(std::move(samples[order[k]]));
        }
    };

    if (minority.size() < 2) {
        split.stratified = false;
        std::vector<std::size_t> all(samples.size());
        std::iota(all.begin(), all.end(), std::size_t(0));
        assign(all, total_train);
    } else {
        auto clamp_train = [](std::size_t want, std::size_t n) {
            // keep at least one sample on each side of the split
            return std::min(std::max<std::size_t>(want, 1), n - 1);
        };
        std::size_t t_min =
            clamp_train(static_cast<std::size_t>(std::llround(ratio * static_cast<double>(minority.size()))),
                        minority.size());
        std::size_t t_rest = total_train > t_min ? total_train - t_min : 0;
        if (rest.size() >= 2) {
            t_rest = clamp_train(t_rest, rest.size());
        } else {
            t_rest = std::min(t_rest, rest.size());
        }
        assign(minority, t_min);
        assign(rest, t_rest);
    }

    split.train_histogram = class_histogram(split.train);
    split.val_histogram = class_histogram(split.val);
    return split;
}

void flatten_points(std::span<const Sample> samples, Tensor& features,
                    std::vector<std::uint8_t>& labels) {
    std::int64_t n = 0;
    for (const auto& s : samples) n += s.pc();
    features.reset({n, kSampleFeatures});
    labels.clear();
    labels.reserve(static_cast<std::size_t>(n));
    std::int64_t row = 0;
    for (const auto& s : samples) {
        for (std::int64_t i = 0; i < s.pc(); ++i, ++row) {
            for (int f = 0; f < kSampleFeatures; ++f) features(row, f) = s.points(i, f);
            labels.push_back(s.labels[static_cast<std::size_t>(i)]);
        }
    }
}

void validate_returns(std::span<const RadarReturn> returns) {
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const LocalPosition expect = polar_to_cartesian(returns[i].polar);
        if (distance(expect, returns[i].cartesian) > 1e-6) {
            throw DataError("return " + std::to_string(i) +
                            ": cartesian position inconsistent with polar measurement");
        }
        if (!std::isfinite(returns[i].t) || !std::isfinite(returns[i].doppler) ||
            !std::isfinite(returns[i].rcs)) {
            throw DataError("return " + std::to_string(i) + ": non-finite field");
        }
    }
}

}  // namespace radarseg
