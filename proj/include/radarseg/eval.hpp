// Evaluation: confusion matrices, per-class precision/recall/F1/accuracy,
// the per-point random-forest baseline, and the model-vs-baseline comparison.
//
// Per-class "accuracy" follows the recall convention (correct x / all true x)
// so reports compare like-for-like with the field results; the combined
// accuracy is trace/total. Precision of a never-predicted class is reported
// as 0 with precision_defined = false.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "radarseg/dataset.hpp"
#include "radarseg/network.hpp"
#include "radarseg/tensor.hpp"

namespace radarseg {

struct ConfusionMatrix {
    int k = kNumClasses;
    std::vector<std::int64_t> counts;  ///< k*k, rows = true class, cols = predicted

    explicit ConfusionMatrix(int num_classes = kNumClasses)
        : k(num_classes), counts(static_cast<std::size_t>(k) * k, 0) {}

    std::int64_t& at(int true_class, int predicted_class) {
        return counts[static_cast<std::size_t>((true_class - 1) * k + (predicted_class - 1))];
    }
    std::int64_t at(int true_class, int predicted_class) const {
        return counts[static_cast<std::size_t>((true_class - 1) * k + (predicted_class - 1))];
    }
    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
};

/// Accumulates counts; throws DataError on length mismatch or codes outside
/// 1..k.
ConfusionMatrix confusion(std::span<const std::uint8_t> predictions,
                          std::span<const std::uint8_t> labels, int k = kNumClasses);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;  ///< recall convention
    bool precision_defined = true;
};

struct MetricsReport {
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double overall_accuracy = 0.0;  ///< trace / total
};

/// Derives the report from a confusion matrix. Throws DataError when the
/// matrix is empty.
MetricsReport metrics(const ConfusionMatrix& cm);

// ---------------------------------------------------------------------------
// Random forest baseline
// ---------------------------------------------------------------------------

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 12;
    int min_leaf = 5;
    double feature_fraction = 0.45;  ///< fraction of features tried per split
    std::uint64_t seed = 0;
    bool bootstrap = true;  ///< disable to fit single exact trees for oracles
};

struct TreeNode {
    int feature = -1;          ///< -1 for leaves
    float threshold = 0.0f;    ///< go left when value <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t leaf_class = 0;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;
    std::uint8_t predict(const float* features) const;
};

class Forest {
public:
    ForestConfig config;
    std::vector<DecisionTree> trees;
    std::uint8_t constant_class = 0;  ///< set for degenerate single-class training data

    /// Majority vote over trees; ties resolve to the smallest class code.
    std::uint8_t predict(const float* features) const;
    std::vector<std::uint8_t> predict_batch(const Tensor& features) const;
};

/// Bagged Gini-split decision trees over per-point features. Deterministic
/// per seed. Single-class training data yields a constant model (with a
/// warning flag in the returned forest).
Forest train_forest(const Tensor& features, std::span<const std::uint8_t> labels,
                    const ForestConfig& config);

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

struct ComparisonReport {
    MetricsReport network;
    MetricsReport forest;
    ConfusionMatrix network_cm{kNumClasses};
    ConfusionMatrix forest_cm{kNumClasses};
};

/// Evaluates the network and the forest per-point on the identical validation
/// point multiset (the flattened encoded samples).
ComparisonReport compare(const Model& model, const Forest& forest,
                         std::span<const Sample> val_samples);

/// One row per (method, class) plus a combined row per method.
std::string metrics_csv(const std::vector<std::pair<std::string, MetricsReport>>& reports,
                        std::uint64_t config_hash);
std::string confusion_csv(const ConfusionMatrix& cm, std::uint64_t config_hash);
std::string metrics_table(const std::string& title, const MetricsReport& report);

}  // namespace radarseg
