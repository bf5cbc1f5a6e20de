#include "radarseg/network.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace radarseg {

namespace {

std::int64_t dense_params(int ci, int co) {
    return static_cast<std::int64_t>(ci) * co + co;
}

std::int64_t tnet_params(const NetworkConfig& cfg, int k) {
    const int c1 = cfg.scaled(cfg.tnet_conv[0]);
    const int c2 = cfg.scaled(cfg.tnet_conv[1]);
    const int c3 = cfg.scaled(cfg.tnet_conv[2]);
    const int f1 = cfg.scaled(cfg.tnet_fc[0]);
    const int f2 = cfg.scaled(cfg.tnet_fc[1]);
    return dense_params(k, c1) + dense_params(c1, c2) + dense_params(c2, c3) +
           dense_params(c3, f1) + dense_params(f1, f2) + dense_params(f2, k * k);
}

}  // namespace

std::int64_t param_count(const NetworkConfig& cfg) {
    const int m1a = cfg.scaled(cfg.mlp1[0]);
    const int m1b = cfg.scaled(cfg.mlp1[1]);
    const int m2a = cfg.scaled(cfg.mlp2[0]);
    const int m2b = cfg.scaled(cfg.mlp2[1]);
    const int m2c = cfg.scaled(cfg.mlp2[2]);
    const int h0 = cfg.scaled(cfg.head[0]);
    const int h1 = cfg.scaled(cfg.head[1]);
    const int h2 = cfg.scaled(cfg.head[2]);
    std::int64_t n = 0;
    if (cfg.has_input_tnet()) n += tnet_params(cfg, 3);
    n += dense_params(cfg.input_features, m1a) + dense_params(m1a, m1b);
    if (cfg.has_feature_tnet()) n += tnet_params(cfg, m1b);
    n += dense_params(m1b, m2a) + dense_params(m2a, m2b) + dense_params(m2b, m2c);
    n += dense_params(m1b + m2c, h0) + dense_params(h0, h1) + dense_params(h1, h2);
    n += dense_params(h2, cfg.num_classes);
    return n;
}

std::vector<std::uint8_t> predict(const Model& model, const Tensor& features) {
    if (features.ndim() != 2) throw ConfigError("predict expects (pc, features)");
    const std::int64_t n = features.dim(0);
    Tensor x = features.reshaped({1, n, features.dim(1)});
    ForwardTraceT<float> tr;
    const Tensor& logits = forward(model, x, tr);
    std::vector<std::uint8_t> out(static_cast<std::size_t>(n));
    const std::int64_t k = model.config.num_classes;
    for (std::int64_t p = 0; p < n; ++p) {
        const float* lp = logits.data() + p * k;
        int best = 0;
        for (std::int64_t j = 1; j < k; ++j) {
            if (lp[j] > lp[best]) best = static_cast<int>(j);
        }
        out[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(best + 1);
    }
    return out;
}

std::vector<std::vector<std::uint8_t>> predict_batch(const Model& model,
                                                     std::span<const Sample> samples, int batch) {
    std::vector<std::vector<std::uint8_t>> out(samples.size());
    if (samples.empty()) return out;
    ForwardTraceT<float> tr;
    Tensor x;
    std::vector<std::uint8_t> labels_scratch;
    std::vector<std::size_t> idx;
    const std::int64_t k = model.config.num_classes;
    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch)) {
        const std::size_t count = std::min(static_cast<std::size_t>(batch), samples.size() - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        assemble_batch<float>(samples, idx, x, labels_scratch);
        const Tensor& logits = forward(model, x, tr);
        const std::int64_t n = x.dim(1);
        for (std::size_t i = 0; i < count; ++i) {
            auto& preds = out[start + i];
            preds.resize(static_cast<std::size_t>(n));
            for (std::int64_t p = 0; p < n; ++p) {
                const float* lp = logits.data() + (static_cast<std::int64_t>(i) * n + p) * k;
                int best = 0;
                for (std::int64_t j = 1; j < k; ++j) {
                    if (lp[j] > lp[best]) best = static_cast<int>(j);
                }
                preds[static_cast<std::size_t>(p)] = static_cast<std::uint8_t>(best + 1);
            }
        }
    }
    return out;
}

EvalStats evaluate(const Model& model, std::span<const Sample> samples, double reg_weight,
                   int batch) {
    if (samples.empty()) throw DataError("evaluate: empty sample set");
    ForwardTraceT<float> tr;
    Tensor x;
    std::vector<std::uint8_t> labels;
    std::vector<std::size_t> idx;
    const std::int64_t k = model.config.num_classes;
    std::int64_t correct = 0, total = 0;
    double weighted_loss = 0.0;
    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(batch)) {
        const std::size_t count = std::min(static_cast<std::size_t>(batch), samples.size() - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        assemble_batch<float>(samples, idx, x, labels);
        const Tensor& logits = forward(model, x, tr);
        std::vector<TensorT<float>> tnets;
        if (model.feature_tnet) tnets.push_back(tr.a64);
        const double l = loss<float>(logits, labels, tnets, reg_weight);
        weighted_loss += l * static_cast<double>(labels.size());
        const std::int64_t rows = static_cast<std::int64_t>(labels.size());
        for (std::int64_t r = 0; r < rows; ++r) {
            const float* lp = logits.data() + r * k;
            int best = 0;
            for (std::int64_t j = 1; j < k; ++j) {
                if (lp[j] > lp[best]) best = static_cast<int>(j);
            }
            if (best + 1 == labels[static_cast<std::size_t>(r)]) ++correct;
        }
        total += rows;
    }
    EvalStats stats;
    stats.loss = weighted_loss / static_cast<double>(total);
    stats.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    return stats;
}

Model train(const NetworkConfig& config, const DatasetSplit& split, const TrainOptions& options,
            std::uint64_t seed) {
    if (split.train.empty()) throw DataError("train: empty training set");
    if (split.val.empty()) throw DataError("train: empty validation set");
    for (const Sample& s : split.train) {
        if (s.pc() != config.pc) {
            throw ConfigError("train: sample pc " + std::to_string(s.pc()) +
                              " does not match config pc " + std::to_string(config.pc));
        }
    }

    Model model = build_model<float>(config, mix_seed(seed, fnv1a("init")));
    auto params = model.params();

    std::mt19937_64 shuffle_rng(mix_seed(seed, fnv1a("shuffle")));
    std::vector<std::size_t> order(split.train.size());
    std::iota(order.begin(), order.end(), std::size_t(0));

    ForwardTraceT<float> tr;
    Tensor x;
    std::vector<std::uint8_t> labels;
    std::int64_t adam_t = 0;
    double best_val = 1e300;
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double train_loss = 0.0, train_reg = 0.0;
        std::int64_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch)) {
            const std::size_t count =
                std::min(static_cast<std::size_t>(options.batch), order.size() - start);
            assemble_batch<float>(split.train, std::span(order).subspan(start, count), x, labels);
            forward(model, x, tr);
            const StepLoss sl = backward(model, x, tr, labels, options.reg_weight);
            adam_step(params, options.adam, ++adam_t);
            train_loss += sl.total * static_cast<double>(count);
            train_reg += sl.reg * static_cast<double>(count);
            seen += static_cast<std::int64_t>(count);
        }
        train_loss /= static_cast<double>(seen);
        train_reg /= static_cast<double>(seen);

        const EvalStats val = evaluate(model, split.val, options.reg_weight, options.batch);
        if (val.loss < best_val - options.min_delta) {
            best_val = val.loss;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
        }

        EpochStatsT<float> row;
        row.epoch = epoch;
        row.train_loss = train_loss;
        row.train_reg = train_reg;
        row.val_loss = val.loss;
        row.val_accuracy = val.accuracy;
        row.best_val_loss = best_val;
        model.history.push_back(row);
        if (options.verbose) {
            std::printf("epoch %3d  train %.4f  val %.4f  acc %.4f\n", epoch, train_loss, val.loss,
                        val.accuracy);
            std::fflush(stdout);
        }

        if (options.stop_val_accuracy >= 0.0 && val.accuracy >= options.stop_val_accuracy) break;
        if (stale_epochs >= options.patience) break;
    }
    return model;
}

}  // namespace radarseg
