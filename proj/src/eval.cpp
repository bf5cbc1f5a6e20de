#include "radarseg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace radarseg {

ConfusionMatrix confusion(std::span<const std::uint8_t> predictions,
                          std::span<const std::uint8_t> labels, int k) {
    if (predictions.size() != labels.size()) {
        throw DataError("confusion: predictions and labels length mismatch");
    }
    ConfusionMatrix cm(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int t = labels[i], p = predictions[i];
        if (t < 1 || t > k || p < 1 || p > k) {
            throw DataError("confusion: class code outside 1.." + std::to_string(k));
        }
        ++cm.at(t, p);
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total <= 0) throw DataError("metrics: empty confusion matrix");
    MetricsReport report;
    report.per_class.resize(static_cast<std::size_t>(cm.k));
    std::int64_t trace = 0;
    double psum = 0.0, rsum = 0.0, fsum = 0.0;
    for (int c = 1; c <= cm.k; ++c) {
        std::int64_t tp = cm.at(c, c), fp = 0, fn = 0;
        for (int o = 1; o <= cm.k; ++o) {
            if (o != c) {
                fp += cm.at(o, c);
                fn += cm.at(c, o);
            }
        }
        trace += tp;
        ClassMetrics& m = report.per_class[static_cast<std::size_t>(c - 1)];
        if (tp + fp == 0) {
            m.precision = 0.0;
            m.precision_defined = false;
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        }
        m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        m.accuracy = m.recall;
        m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                            : 0.0;
        psum += m.precision;
        rsum += m.recall;
        fsum += m.f1;
    }
    report.macro_precision = psum / cm.k;
    report.macro_recall = rsum / cm.k;
    report.macro_f1 = fsum / cm.k;
    report.overall_accuracy = static_cast<double>(trace) / static_cast<double>(total);
    return report;
}

// ---------------------------------------------------------------------------
// Forest
// ---------------------------------------------------------------------------

std::uint8_t DecisionTree::predict(const float* features) const {
    std::int32_t node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        node = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(node)].leaf_class;
}

namespace {

struct TreeBuilder {
    const Tensor& features;
    std::span<const std::uint8_t> labels;
    const ForestConfig& cfg;
    int n_features;
    int mtry;
    std::mt19937_64 rng;
    std::vector<TreeNode> nodes;

    // Gini impurity of a histogram over kNumClasses classes.
    static double gini(const std::array<std::int64_t, kNumClasses + 1>& hist, std::int64_t n) {
        if (n == 0) return 0.0;
        double g = 1.0;
        for (int c = 1; c <= kNumClasses; ++c) {
            const double p = static_cast<double>(hist[static_cast<std::size_t>(c)]) /
                             static_cast<double>(n);
            g -= p * p;
        }
        return g;
    }

    std::uint8_t majority(std::span<const std::size_t> idx) const {
        std::array<std::int64_t, kNumClasses + 1> hist{};
        for (std::size_t i : idx) ++hist[labels[i]];
        int best = 1;
        for (int c = 2; c <= kNumClasses; ++c) {
            if (hist[static_cast<std::size_t>(c)] > hist[static_cast<std::size_t>(best)]) best = c;
        }
        return static_cast<std::uint8_t>(best);
    }

    std::int32_t build(std::vector<std::size_t>& idx, int depth) {
        const auto node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();

        std::array<std::int64_t, kNumClasses + 1> hist{};
        for (std::size_t i : idx) ++hist[labels[i]];
        const auto n = static_cast<std::int64_t>(idx.size());
        bool pure = false;
        for (int c = 1; c <= kNumClasses; ++c) {
            if (hist[static_cast<std::size_t>(c)] == n) pure = true;
        }
        if (pure || depth >= cfg.max_depth || n < 2 * cfg.min_leaf) {
            nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
            return node_id;
        }

        // candidate features, in index order for determinism
        std::vector<int> feats(static_cast<std::size_t>(n_features));
        std::iota(feats.begin(), feats.end(), 0);
        for (int i = n_features - 1; i > 0; --i) {
            std::uniform_int_distribution<int> d(0, i);
            std::swap(feats[static_cast<std::size_t>(i)], feats[static_cast<std::size_t>(d(rng))]);
        }
        feats.resize(static_cast<std::size_t>(mtry));
        std::sort(feats.begin(), feats.end());

        const double parent_gini = gini(hist, n);
        double best_gain = 1e-12;
        int best_feature = -1;
        float best_threshold = 0.0f;

        std::vector<std::pair<float, std::uint8_t>> sorted;
        sorted.reserve(idx.size());
        for (int f : feats) {
            sorted.clear();
            for (std::size_t i : idx) {
                sorted.emplace_back(features(static_cast<std::int64_t>(i), f), labels[i]);
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::array<std::int64_t, kNumClasses + 1> left_hist{};
            std::array<std::int64_t, kNumClasses + 1> right_hist = hist;
            std::int64_t n_left = 0;

            // For large nodes, probe a capped number of quantile positions
            // instead of every distinct midpoint (deterministic, no RNG).
            const std::size_t count = sorted.size();
            const std::size_t max_candidates = 64;
            const bool capped = count > 4096;
            std::size_t stride = capped ? count / max_candidates : 1;
            if (stride == 0) stride = 1;
            std::size_t next_probe = stride;

            for (std::size_t i = 0; i + 1 < count; ++i) {
                const std::uint8_t cls = sorted[i].second;
                ++left_hist[cls];
                --right_hist[cls];
                ++n_left;
                if (sorted[i].first == sorted[i + 1].first) continue;
                if (capped) {
                    if (i + 1 < next_probe) continue;
                    next_probe += stride;
                }
                if (n_left < cfg.min_leaf || n - n_left < cfg.min_leaf) continue;
                const double g =
                    parent_gini -
                    (static_cast<double>(n_left) / static_cast<double>(n)) * gini(left_hist, n_left) -
                    (static_cast<double>(n - n_left) / static_cast<double>(n)) *
                        gini(right_hist, n - n_left);
                if (g > best_gain) {
                    best_gain = g;
                    best_feature = f;
                    best_threshold =
                        0.5f * (sorted[i].first + sorted[i + 1].first);
                    // guard against midpoint rounding onto the right value
                    if (!(sorted[i].first <= best_threshold && best_threshold < sorted[i + 1].first)) {
                        best_threshold = sorted[i].first;
                    }
                }
            }
        }

        if (best_feature < 0) {
            nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
            return node_id;
        }

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (std::size_t i : idx) {
            (features(static_cast<std::int64_t>(i), best_feature) <= best_threshold ? left_idx
                                                                                    : right_idx)
                .push_back(i);
        }
        if (left_idx.empty() || right_idx.empty()) {
            nodes[static_cast<std::size_t>(node_id)].leaf_class = majority(idx);
            return node_id;
        }
        idx.clear();
        idx.shrink_to_fit();

        nodes[static_cast<std::size_t>(node_id)].feature = best_feature;
        nodes[static_cast<std::size_t>(node_id)].threshold = best_threshold;
        const std::int32_t left = build(left_idx, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].left = left;
        const std::int32_t right = build(right_idx, depth + 1);
        nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

}  // namespace

Forest train_forest(const Tensor& features, std::span<const std::uint8_t> labels,
                    const ForestConfig& config) {
    if (features.ndim() != 2) throw ConfigError("train_forest expects (n, features)");
    if (features.dim(0) != static_cast<std::int64_t>(labels.size())) {
        throw DataError("train_forest: features/labels length mismatch");
    }
    if (config.n_trees < 1) throw ConfigError("n_trees must be >= 1");
    const std::int64_t n = features.dim(0);
    if (n == 0) throw DataError("train_forest: empty training set");

    Forest forest;
    forest.config = config;

    std::array<bool, kNumClasses + 1> present{};
    for (auto l : labels) {
        if (l < 1 || l > kNumClasses) throw DataError("train_forest: label outside 1..5");
        present[l] = true;
    }
    const int distinct = static_cast<int>(std::count(present.begin(), present.end(), true));
    if (distinct < 2) {
        for (int c = 1; c <= kNumClasses; ++c) {
            if (present[static_cast<std::size_t>(c)]) {
                forest.constant_class = static_cast<std::uint8_t>(c);
            }
        }
        std::fprintf(stderr, "warning: single-class training data, forest is a constant model\n");
        return forest;
    }

    const int n_features = static_cast<int>(features.dim(1));
    const int mtry = std::clamp(
        static_cast<int>(std::llround(config.feature_fraction * n_features)), 1, n_features);

    for (int t = 0; t < config.n_trees; ++t) {
        TreeBuilder builder{features, labels, config, n_features, mtry,
                            std::mt19937_64(mix_seed(config.seed, static_cast<std::uint64_t>(t))),
                            {}};
        std::vector<std::size_t> idx;
        idx.reserve(static_cast<std::size_t>(n));
        if (config.bootstrap) {
            std::uniform_int_distribution<std::int64_t> d(0, n - 1);
            for (std::int64_t i = 0; i < n; ++i) {
                idx.push_back(static_cast<std::size_t>(d(builder.rng)));
            }
        } else {
            idx.resize(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), std::size_t(0));
        }
        builder.build(idx, 0);
        DecisionTree tree;
        tree.nodes = std::move(builder.nodes);
        forest.trees.push_back(std::move(tree));
    }
    return forest;
}

std::uint8_t Forest::predict(const float* features) const {
    if (trees.empty()) return constant_class;
    std::array<int, kNumClasses + 1> votes{};
    for (const auto& tree : trees) ++votes[tree.predict(features)];
    int best = 1;
    for (int c = 2; c <= kNumClasses; ++c) {
        if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
    }
    return static_cast<std::uint8_t>(best);
}

std::vector<std::uint8_t> Forest::predict_batch(const Tensor& features) const {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(features.dim(0)));
    for (std::int64_t i = 0; i < features.dim(0); ++i) {
        out[static_cast<std::size_t>(i)] = predict(features.data() + i * features.dim(1));
    }
    return out;
}

ComparisonReport compare(const Model& model, const Forest& forest,
                         std::span<const Sample> val_samples) {
    if (val_samples.empty()) throw DataError("compare: empty validation set");

    Tensor features;
    std::vector<std::uint8_t> labels;
    flatten_points(val_samples, features, labels);

    const auto net_preds_per_sample = predict_batch(model, val_samples);
    std::vector<std::uint8_t> net_preds;
    net_preds.reserve(labels.size());
    for (const auto& p : net_preds_per_sample) net_preds.insert(net_preds.end(), p.begin(), p.end());

    const std::vector<std::uint8_t> forest_preds = forest.predict_batch(features);

    ComparisonReport report;
    report.network_cm = confusion(net_preds, labels);
    report.forest_cm = confusion(forest_preds, labels);
    report.network = metrics(report.network_cm);
    report.forest = metrics(report.forest_cm);
    return report;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

const char* metric_class_name(int c) {
    if (c >= 1 && c <= kNumClasses) return class_name(static_cast<ClassLabel>(c));
    return "combined";
}

}  // namespace

std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                        std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# schema=radarseg.metrics.v1 config=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    std::string out = buf;
    out += "method,class,precision,recall,f1,accuracy,precision_defined\n";
    for (const auto& [method, report] : reports) {
        for (int c = 1; c <= static_cast<int>(report.per_class.size()); ++c) {
            const ClassMetrics& m = report.per_class[static_cast<std::size_t>(c - 1)];
            std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.6f,%.6f,%d\n", method.c_str(),
                          metric_class_name(c), m.precision, m.recall, m.f1, m.accuracy,
                          m.precision_defined ? 1 : 0);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf), "%s,combined,%.6f,%.6f,%.6f,%.6f,1\n", method.c_str(),
                      report.macro_precision, report.macro_recall, report.macro_f1,
                      report.overall_accuracy);
        out += buf;
    }
    return out;
}

std::string confusion_csv(const ConfusionMatrix& cm, std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# schema=radarseg.confusion.v1 config=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    std::string out = buf;
    out += "true\\pred";
    for (int c = 1; c <= cm.k; ++c) {
        out += ',';
        out += metric_class_name(c);
    }
    out += '\n';
    for (int r = 1; r <= cm.k; ++r) {
        out += metric_class_name(r);
        for (int c = 1; c <= cm.k; ++c) {
            std::snprintf(buf, sizeof(buf), ",%lld", static_cast<long long>(cm.at(r, c)));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::string metrics_table(const std::string& title, const MetricsReport& report) {
    char buf[256];
    std::string out = title + "\n";
    std::snprintf(buf, sizeof(buf), "  %-16s %9s %9s %9s %9s\n", "class", "precision", "recall",
                  "f1", "accuracy");
    out += buf;
    for (int c = 1; c <= static_cast<int>(report.per_class.size()); ++c) {
        const ClassMetrics& m = report.per_class[static_cast<std::size_t>(c - 1)];
        std::snprintf(buf, sizeof(buf), "  %-16s %9.3f %9.3f %9.3f %9.3f%s\n", metric_class_name(c),
                      m.precision, m.recall, m.f1, m.accuracy,
                      m.precision_defined ? "" : "  (no predictions)");
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "  %-16s %9.3f %9.3f %9.3f %9.3f\n", "combined",
                  report.macro_precision, report.macro_recall, report.macro_f1,
                  report.overall_accuracy);
    out += buf;
    return out;
}

}  // namespace radarseg
