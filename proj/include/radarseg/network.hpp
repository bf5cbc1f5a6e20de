// PointNet-style segmentation network over radar point samples, with the
// three architecture ablations, Adam training, and inference.
//
// Pipeline (widths before the per-variant scale):
//   [input TNet on the 3 spatial dims]
//   shared MLP(64, 64)                       -> local features
//   [feature TNet on the 64-d features]
//   shared MLP(64, 128, 1024)
//   max pool over points                     -> global feature
//   concat(local, tiled global)
//   shared MLP(512, 256, 128) -> linear to num_classes logits per point
//
// Variants: Full keeps both TNets; OneTNet keeps only the input transform
// (the feature transform dominates the parameter count); NoTNet keeps
// neither; OneTNetReduced is OneTNet with every width halved.
//
// TNets initialize to the identity transform (zero final weights, identity
// bias), so a freshly built model matches its TNet-free counterpart exactly.
// Every layer's weights are drawn from an RNG stream keyed by the layer
// name, so shared layers start identical across variants for a fixed seed.
//
// Training mutates a model single-threaded; a trained model is immutable and
// can be shared across threads for inference.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "radarseg/dataset.hpp"
#include "radarseg/tensor.hpp"

namespace radarseg {

enum class Variant { Full, OneTNet, OneTNetReduced, NoTNet };

inline const char* variant_name(Variant v) {
    switch (v) {
    case Variant::Full: return "full";
    case Variant::OneTNet: return "one-tnet";
    case Variant::OneTNetReduced: return "one-tnet-reduced";
    case Variant::NoTNet: return "no-tnet";
    }
    return "?";
}

inline Variant variant_from_name(const std::string& name) {
    if (name == "full") return Variant::Full;
    if (name == "one-tnet") return Variant::OneTNet;
    if (name == "one-tnet-reduced") return Variant::OneTNetReduced;
    if (name == "no-tnet") return Variant::NoTNet;
    throw ConfigError("unknown variant: " + name);
}

struct NetworkConfig {
    Variant variant = Variant::OneTNet;
    int input_features = kSampleFeatures;
    int num_classes = kNumClasses;
    int pc = kDefaultPointCount;
    std::array<int, 2> mlp1{64, 64};
    std::array<int, 3> mlp2{64, 128, 1024};
    std::array<int, 3> head{512, 256, 128};
    std::array<int, 3> tnet_conv{64, 128, 1024};
    std::array<int, 2> tnet_fc{512, 256};

    double width_scale() const { return variant == Variant::OneTNetReduced ? 0.5 : 1.0; }
    bool has_input_tnet() const { return variant != Variant::NoTNet; }
    bool has_feature_tnet() const { return variant == Variant::Full; }
    int scaled(int w) const {
        return std::max(1, static_cast<int>(std::llround(w * width_scale())));
    }
};

/// Trainable scalar count of a configuration (weights + biases).
std::int64_t param_count(const NetworkConfig& config);

template <typename T>
struct ParamT {
    std::string name;
    TensorT<T> value;
    TensorT<T> grad;
    TensorT<T> m;  // Adam first moment
    TensorT<T> v;  // Adam second moment
};

template <typename T>
struct DenseT {
    ParamT<T> w;  // c_in x c_out
    ParamT<T> b;  // c_out
};

namespace detail {

template <typename T>
void init_dense(DenseT<T>& layer, const std::string& name, int ci, int co, std::uint64_t seed,
                bool zero_weights = false) {
    layer.w.name = name + ".w";
    layer.b.name = name + ".b";
    layer.w.value.reset({ci, co});
    layer.b.value.reset({co});
    layer.w.grad.reset({ci, co});
    layer.b.grad.reset({co});
    layer.w.m.reset({ci, co});
    layer.w.v.reset({ci, co});
    layer.b.m.reset({co});
    layer.b.v.reset({co});
    if (!zero_weights) {
        // uniform fan-in scaling
        std::mt19937_64 rng(mix_seed(seed, fnv1a(layer.w.name)));
        const T bound = T(1) / std::sqrt(T(ci));
        std::uniform_real_distribution<double> d(-static_cast<double>(bound), static_cast<double>(bound));
        for (std::int64_t i = 0; i < layer.w.value.size(); ++i) layer.w.value(i) = static_cast<T>(d(rng));
        for (std::int64_t i = 0; i < layer.b.value.size(); ++i) layer.b.value(i) = static_cast<T>(d(rng));
    }
}

/// Rows of out = rows of x times w, plus bias: the dense layer on 2-D input.
template <typename T>
void dense2d_forward(TensorT<T>& out, const TensorT<T>& x, const DenseT<T>& layer) {
    matmul_into(out, x, layer.w.value);
    const std::int64_t rows = out.dim(0), co = out.dim(1);
    for (std::int64_t r = 0; r < rows; ++r) {
        for (std::int64_t j = 0; j < co; ++j) out(r, j) += layer.b.value(j);
    }
}

template <typename T>
void dense2d_backward(const TensorT<T>& x, DenseT<T>& layer, const TensorT<T>& dy, TensorT<T>& dx) {
    TensorT<T> wt = transpose2d(layer.w.value);
    matmul_into(dx, dy, wt);
    TensorT<T> xt = transpose2d(x);
    matmul_into(layer.w.grad, xt, dy);
    layer.b.grad.fill(T(0));
    for (std::int64_t r = 0; r < dy.dim(0); ++r) {
        for (std::int64_t j = 0; j < dy.dim(1); ++j) layer.b.grad(j) += dy(r, j);
    }
}

/// Batched (N x K) * (K x K) per sample.
template <typename T>
void bmm_into(TensorT<T>& out, const TensorT<T>& x, const TensorT<T>& a) {
    const std::int64_t b = x.dim(0), n = x.dim(1), k = x.dim(2);
    if (out.ndim() != 3 || out.dim(0) != b || out.dim(1) != n || out.dim(2) != k) out.reset({b, n, k});
    for (std::int64_t i = 0; i < b; ++i) {
        radarseg::detail::matmul_blocked(x.data() + i * n * k, a.data() + i * k * k,
                                         out.data() + i * n * k, n, k, k);
    }
}

template <typename T>
void bmm_backward(const TensorT<T>& x, const TensorT<T>& a, const TensorT<T>& dout,
                  TensorT<T>& dx, TensorT<T>& da) {
    const std::int64_t b = x.dim(0), n = x.dim(1), k = x.dim(2);
    if (!dx.same_shape(x)) dx.reset(x.shape());
    if (!da.same_shape(a)) da.reset(a.shape());
    TensorT<T> at({k, k}), xt({k, n});
    for (std::int64_t i = 0; i < b; ++i) {
        TensorT<T> ai({k, k});
        std::copy(a.data() + i * k * k, a.data() + (i + 1) * k * k, ai.data());
        transpose2d_into(at, ai);
        radarseg::detail::matmul_blocked(dout.data() + i * n * k, at.data(), dx.data() + i * n * k,
                                         n, k, k);
        TensorT<T> xi({n, k});
        std::copy(x.data() + i * n * k, x.data() + (i + 1) * n * k, xi.data());
        transpose2d_into(xt, xi);
        radarseg::detail::matmul_blocked(xt.data(), dout.data() + i * n * k, da.data() + i * k * k,
                                         k, n, k);
    }
}

}  // namespace detail

template <typename T>
struct TNetT {
    int k = 0;
    DenseT<T> conv1, conv2, conv3, fc1, fc2, out;
};

template <typename T>
struct TNetTraceT {
    TensorT<T> t1, t2, t3;
    TensorT<T> pooled;
    TensorT<std::int32_t> argmax;
    TensorT<T> q1, q2;
    TensorT<T> a;  // b x k*k
};

template <typename T>
struct EpochStatsT {
    int epoch = 0;
    double train_loss = 0.0;
    double train_reg = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    double best_val_loss = 0.0;
};

using EpochStats = EpochStatsT<float>;

template <typename T>
struct ModelT {
    NetworkConfig config;
    std::optional<TNetT<T>> input_tnet;
    std::optional<TNetT<T>> feature_tnet;
    DenseT<T> mlp1_0, mlp1_1;
    DenseT<T> mlp2_0, mlp2_1, mlp2_2;
    DenseT<T> head_0, head_1, head_2;
    DenseT<T> classifier;
    std::vector<EpochStatsT<T>> history;

    std::vector<ParamT<T>*> params() {
        std::vector<ParamT<T>*> out;
        auto add = [&](DenseT<T>& d) {
            out.push_back(&d.w);
            out.push_back(&d.b);
        };
        auto add_tnet = [&](std::optional<TNetT<T>>& t) {
            if (!t) return;
            add(t->conv1);
            add(t->conv2);
            add(t->conv3);
            add(t->fc1);
            add(t->fc2);
            add(t->out);
        };
        add_tnet(input_tnet);
        add(mlp1_0);
        add(mlp1_1);
        add_tnet(feature_tnet);
        add(mlp2_0);
        add(mlp2_1);
        add(mlp2_2);
        add(head_0);
        add(head_1);
        add(head_2);
        add(classifier);
        return out;
    }

    std::int64_t num_params() {
        std::int64_t n = 0;
        for (auto* p : params()) n += p->value.size();
        return n;
    }
};

using Model = ModelT<float>;

namespace detail {

template <typename T>
TNetT<T> build_tnet(const NetworkConfig& cfg, const std::string& name, int k, std::uint64_t seed) {
    TNetT<T> t;
    t.k = k;
    const int c1 = cfg.scaled(cfg.tnet_conv[0]);
    const int c2 = cfg.scaled(cfg.tnet_conv[1]);
    const int c3 = cfg.scaled(cfg.tnet_conv[2]);
    const int f1 = cfg.scaled(cfg.tnet_fc[0]);
    const int f2 = cfg.scaled(cfg.tnet_fc[1]);
    init_dense(t.conv1, name + ".conv1", k, c1, seed);
    init_dense(t.conv2, name + ".conv2", c1, c2, seed);
    init_dense(t.conv3, name + ".conv3", c2, c3, seed);
    init_dense(t.fc1, name + ".fc1", c3, f1, seed);
    init_dense(t.fc2, name + ".fc2", f1, f2, seed);
    // identity at step 0: zero weights, identity bias
    init_dense(t.out, name + ".out", f2, k * k, seed, /*zero_weights=*/true);
    for (int i = 0; i < k; ++i) t.out.b.value(i * k + i) = T(1);
    return t;
}

}  // namespace detail

template <typename T>
ModelT<T> build_model(const NetworkConfig& cfg, std::uint64_t seed) {
    if (cfg.input_features < 4) throw ConfigError("network needs at least x,y,z + 1 feature");
    ModelT<T> m;
    m.config = cfg;
    const int f = cfg.input_features;
    const int m1a = cfg.scaled(cfg.mlp1[0]);
    const int m1b = cfg.scaled(cfg.mlp1[1]);
    const int m2a = cfg.scaled(cfg.mlp2[0]);
    const int m2b = cfg.scaled(cfg.mlp2[1]);
    const int m2c = cfg.scaled(cfg.mlp2[2]);
    const int h0 = cfg.scaled(cfg.head[0]);
    const int h1 = cfg.scaled(cfg.head[1]);
    const int h2 = cfg.scaled(cfg.head[2]);

    if (cfg.has_input_tnet()) m.input_tnet = detail::build_tnet<T>(cfg, "input_tnet", 3, seed);
    detail::init_dense(m.mlp1_0, "mlp1.0", f, m1a, seed);
    detail::init_dense(m.mlp1_1, "mlp1.1", m1a, m1b, seed);
    if (cfg.has_feature_tnet()) {
        m.feature_tnet = detail::build_tnet<T>(cfg, "feature_tnet", m1b, seed);
    }
    detail::init_dense(m.mlp2_0, "mlp2.0", m1b, m2a, seed);
    detail::init_dense(m.mlp2_1, "mlp2.1", m2a, m2b, seed);
    detail::init_dense(m.mlp2_2, "mlp2.2", m2b, m2c, seed);
    detail::init_dense(m.head_0, "head.0", m1b + m2c, h0, seed);
    detail::init_dense(m.head_1, "head.1", h0, h1, seed);
    detail::init_dense(m.head_2, "head.2", h1, h2, seed);
    detail::init_dense(m.classifier, "classifier", h2, cfg.num_classes, seed);
    return m;
}

template <typename T>
struct ForwardTraceT {
    // input transform
    TensorT<T> spatial_in, a3, spatial_out, x1;
    TNetTraceT<T> tnet3;
    // shared MLPs
    TensorT<T> h1, h2;
    // feature transform
    TensorT<T> a64, hf;
    TNetTraceT<T> tnetf;
    TensorT<T> h3, h4, h5;
    TensorT<T> global_feat;
    TensorT<std::int32_t> global_argmax;
    TensorT<T> tiled, cat;
    TensorT<T> s1, s2, s3;
    TensorT<T> logits;
};

namespace detail {

template <typename T>
void conv_relu(TensorT<T>& out, const TensorT<T>& x, const DenseT<T>& layer) {
    conv1d_k1_into(out, x, layer.w.value, layer.b.value);
    T* p = out.data();
    for (std::int64_t i = 0; i < out.size(); ++i) p[i] = p[i] > T(0) ? p[i] : T(0);
}

template <typename T>
void tnet_forward(const TNetT<T>& t, const TensorT<T>& x, TNetTraceT<T>& tr, TensorT<T>& a_mat) {
    const std::int64_t b = x.dim(0);
    conv_relu(tr.t1, x, t.conv1);
    conv_relu(tr.t2, tr.t1, t.conv2);
    conv_relu(tr.t3, tr.t2, t.conv3);
    maxpool_points(tr.t3, tr.pooled, tr.argmax);
    dense2d_forward(tr.q1, tr.pooled, t.fc1);
    relu_into(tr.q1, tr.q1);
    dense2d_forward(tr.q2, tr.q1, t.fc2);
    relu_into(tr.q2, tr.q2);
    dense2d_forward(tr.a, tr.q2, t.out);
    a_mat = tr.a.reshaped({b, t.k, t.k});
}

/// Backward through a TNet; writes the gradient wrt the TNet input into dx.
template <typename T>
void tnet_backward(TNetT<T>& t, const TensorT<T>& x, const TNetTraceT<T>& tr,
                   const TensorT<T>& da_mat, TensorT<T>& dx) {
    const std::int64_t b = x.dim(0);
    TensorT<T> da = da_mat.reshaped({b, static_cast<std::int64_t>(t.k) * t.k});
    TensorT<T> dq2, dq1, dpool, dt3, dt2, dt1;
    dense2d_backward(tr.q2, t.out, da, dq2);
    relu_backward_inplace(tr.q2, dq2);
    dense2d_backward(tr.q1, t.fc2, dq2, dq1);
    relu_backward_inplace(tr.q1, dq1);
    dense2d_backward(tr.pooled, t.fc1, dq1, dpool);
    maxpool_points_backward(dpool, tr.argmax, tr.t3.dim(1), dt3);
    relu_backward_inplace(tr.t3, dt3);
    conv1d_k1_backward(tr.t2, t.conv3.w.value, dt3, dt2, t.conv3.w.grad, t.conv3.b.grad);
    relu_backward_inplace(tr.t2, dt2);
    conv1d_k1_backward(tr.t1, t.conv2.w.value, dt2, dt1, t.conv2.w.grad, t.conv2.b.grad);
    relu_backward_inplace(tr.t1, dt1);
    conv1d_k1_backward(x, t.conv1.w.value, dt1, dx, t.conv1.w.grad, t.conv1.b.grad);
}

/// Copy the first `k` feature channels out of (b,n,f).
template <typename T>
void slice_channels(TensorT<T>& out, const TensorT<T>& x, std::int64_t from, std::int64_t count) {
    const std::int64_t b = x.dim(0), n = x.dim(1), f = x.dim(2);
    if (out.ndim() != 3 || out.dim(0) != b || out.dim(1) != n || out.dim(2) != count) {
        out.reset({b, n, count});
    }
    for (std::int64_t i = 0; i < b * n; ++i) {
        const T* src = x.data() + i * f + from;
        T* dst = out.data() + i * count;
        for (std::int64_t j = 0; j < count; ++j) dst[j] = src[j];
    }
}

template <typename T>
void tile_points(TensorT<T>& out, const TensorT<T>& g, std::int64_t n) {
    const std::int64_t b = g.dim(0), c = g.dim(1);
    if (out.ndim() != 3 || out.dim(0) != b || out.dim(1) != n || out.dim(2) != c) out.reset({b, n, c});
    for (std::int64_t i = 0; i < b; ++i) {
        const T* src = g.data() + i * c;
        for (std::int64_t p = 0; p < n; ++p) {
            std::copy(src, src + c, out.data() + (i * n + p) * c);
        }
    }
}

template <typename T>
void tile_points_backward(TensorT<T>& dg, const TensorT<T>& dout) {
    const std::int64_t b = dout.dim(0), n = dout.dim(1), c = dout.dim(2);
    if (dg.ndim() != 2 || dg.dim(0) != b || dg.dim(1) != c) dg.reset({b, c});
    dg.fill(T(0));
    for (std::int64_t i = 0; i < b; ++i) {
        T* dst = dg.data() + i * c;
        for (std::int64_t p = 0; p < n; ++p) {
            const T* src = dout.data() + (i * n + p) * c;
            for (std::int64_t j = 0; j < c; ++j) dst[j] += src[j];
        }
    }
}

}  // namespace detail

/// Forward pass over a batch (b, n, input_features) -> logits (b, n, classes).
/// `trace` keeps every activation needed by backward().
template <typename T>
const TensorT<T>& forward(const ModelT<T>& m, const TensorT<T>& x, ForwardTraceT<T>& tr) {
    if (x.ndim() != 3 || x.dim(2) != m.config.input_features) {
        throw ConfigError("forward: expected (b, n, " + std::to_string(m.config.input_features) +
                          "), got " + x.shape_str());
    }
    const std::int64_t n = x.dim(1);

    const TensorT<T>* features = &x;
    if (m.input_tnet) {
        detail::slice_channels(tr.spatial_in, x, 0, 3);
        detail::tnet_forward(*m.input_tnet, tr.spatial_in, tr.tnet3, tr.a3);
        detail::bmm_into(tr.spatial_out, tr.spatial_in, tr.a3);
        TensorT<T> extra;
        detail::slice_channels(extra, x, 3, m.config.input_features - 3);
        tr.x1 = concat(tr.spatial_out, extra, 2);
        features = &tr.x1;
    }

    detail::conv_relu(tr.h1, *features, m.mlp1_0);
    detail::conv_relu(tr.h2, tr.h1, m.mlp1_1);

    const TensorT<T>* local = &tr.h2;
    if (m.feature_tnet) {
        detail::tnet_forward(*m.feature_tnet, tr.h2, tr.tnetf, tr.a64);
        detail::bmm_into(tr.hf, tr.h2, tr.a64);
        local = &tr.hf;
    }

    detail::conv_relu(tr.h3, *local, m.mlp2_0);
    detail::conv_relu(tr.h4, tr.h3, m.mlp2_1);
    detail::conv_relu(tr.h5, tr.h4, m.mlp2_2);
    maxpool_points(tr.h5, tr.global_feat, tr.global_argmax);
    detail::tile_points(tr.tiled, tr.global_feat, n);
    tr.cat = concat(*local, tr.tiled, 2);

    detail::conv_relu(tr.s1, tr.cat, m.head_0);
    detail::conv_relu(tr.s2, tr.s1, m.head_1);
    detail::conv_relu(tr.s3, tr.s2, m.head_2);
    conv1d_k1_into(tr.logits, tr.s3, m.classifier.w.value, m.classifier.b.value);
    return tr.logits;
}

/// Mean per-point cross entropy plus the orthogonality regularizer over the
/// feature-TNet outputs: reg_weight * mean_b ||I - A A^T||_F^2. Labels use
/// class codes 1..num_classes.
template <typename T>
double loss(const TensorT<T>& logits, std::span<const std::uint8_t> labels,
            std::span<const TensorT<T>> feature_tnet_outputs, double reg_weight) {
    const std::int64_t k = logits.dim(logits.ndim() - 1);
    const std::int64_t rows = logits.size() / k;
    if (static_cast<std::int64_t>(labels.size()) != rows) {
        throw ConfigError("loss: labels length mismatch");
    }
    double ce = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
        const int label = labels[static_cast<std::size_t>(r)];
        if (label < 1 || label > k) {
            throw DataError("loss: label out of range: " + std::to_string(label));
        }
        const T* lr = logits.data() + r * k;
        T mx = lr[0];
        for (std::int64_t j = 1; j < k; ++j) mx = std::max(mx, lr[j]);
        double sum = 0.0;
        for (std::int64_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(lr[j] - mx));
        ce += std::log(sum) - static_cast<double>(lr[label - 1] - mx);
    }
    ce /= static_cast<double>(rows);

    double reg = 0.0;
    for (const auto& a : feature_tnet_outputs) {
        const std::int64_t b = a.ndim() == 3 ? a.dim(0) : 1;
        const std::int64_t kk = a.dim(a.ndim() - 1);
        double total = 0.0;
        for (std::int64_t i = 0; i < b; ++i) {
            const T* ap = a.data() + i * kk * kk;
            for (std::int64_t r = 0; r < kk; ++r) {
                for (std::int64_t c = 0; c < kk; ++c) {
                    double aat = 0.0;
                    for (std::int64_t p = 0; p < kk; ++p) {
                        aat += static_cast<double>(ap[r * kk + p]) * static_cast<double>(ap[c * kk + p]);
                    }
                    const double e = (r == c ? 1.0 : 0.0) - aat;
                    total += e * e;
                }
            }
        }
        reg += total / static_cast<double>(b);
    }
    return ce + reg_weight * reg;
}

struct StepLoss {
    double total = 0.0;
    double ce = 0.0;
    double reg = 0.0;
};

/// Full backward pass: computes gradients of (mean CE + reg_weight * reg)
/// into every parameter's .grad. Returns the loss components.
template <typename T>
StepLoss backward(ModelT<T>& m, const TensorT<T>& x, ForwardTraceT<T>& tr,
                  std::span<const std::uint8_t> labels, double reg_weight) {
    const std::int64_t b = x.dim(0), n = x.dim(1);
    const std::int64_t k = m.config.num_classes;
    const std::int64_t rows = b * n;

    StepLoss result;

    // d(mean CE)/dlogits = (softmax - onehot) / rows
    TensorT<T> dlogits(tr.logits.shape());
    double ce = 0.0;
    for (std::int64_t r = 0; r < rows; ++r) {
        const int label = labels[static_cast<std::size_t>(r)];
        if (label < 1 || label > k) throw DataError("train: label out of range");
        const T* lr = tr.logits.data() + r * k;
        T* dr = dlogits.data() + r * k;
        T mx = lr[0];
        for (std::int64_t j = 1; j < k; ++j) mx = std::max(mx, lr[j]);
        double sum = 0.0;
        for (std::int64_t j = 0; j < k; ++j) sum += std::exp(static_cast<double>(lr[j] - mx));
        ce += std::log(sum) - static_cast<double>(lr[label - 1] - mx);
        const T inv = static_cast<T>(1.0 / sum);
        for (std::int64_t j = 0; j < k; ++j) {
            const T p = std::exp(lr[j] - mx) * inv;
            dr[j] = (p - (j == label - 1 ? T(1) : T(0))) / static_cast<T>(rows);
        }
    }
    result.ce = ce / static_cast<double>(rows);

    // head
    TensorT<T> ds3, ds2, ds1, dcat;
    conv1d_k1_backward(tr.s3, m.classifier.w.value, dlogits, ds3, m.classifier.w.grad,
                       m.classifier.b.grad);
    relu_backward_inplace(tr.s3, ds3);
    conv1d_k1_backward(tr.s2, m.head_2.w.value, ds3, ds2, m.head_2.w.grad, m.head_2.b.grad);
    relu_backward_inplace(tr.s2, ds2);
    conv1d_k1_backward(tr.s1, m.head_1.w.value, ds2, ds1, m.head_1.w.grad, m.head_1.b.grad);
    relu_backward_inplace(tr.s1, ds1);
    conv1d_k1_backward(tr.cat, m.head_0.w.value, ds1, dcat, m.head_0.w.grad, m.head_0.b.grad);

    // split concat gradient into local features and tiled global feature
    const TensorT<T>& local = m.feature_tnet ? tr.hf : tr.h2;
    TensorT<T> dlocal, dtiled;
    concat_backward(dcat, 2, local.dim(2), dlocal, dtiled);

    TensorT<T> dglobal;
    detail::tile_points_backward(dglobal, dtiled);
    TensorT<T> dh5;
    maxpool_points_backward(dglobal, tr.global_argmax, n, dh5);
    relu_backward_inplace(tr.h5, dh5);

    TensorT<T> dh4, dh3, dlocal2;
    conv1d_k1_backward(tr.h4, m.mlp2_2.w.value, dh5, dh4, m.mlp2_2.w.grad, m.mlp2_2.b.grad);
    relu_backward_inplace(tr.h4, dh4);
    conv1d_k1_backward(tr.h3, m.mlp2_1.w.value, dh4, dh3, m.mlp2_1.w.grad, m.mlp2_1.b.grad);
    relu_backward_inplace(tr.h3, dh3);
    conv1d_k1_backward(local, m.mlp2_0.w.value, dh3, dlocal2, m.mlp2_0.w.grad, m.mlp2_0.b.grad);

    // total gradient flowing into the (possibly transformed) local features
    for (std::int64_t i = 0; i < dlocal.size(); ++i) dlocal(i) += dlocal2(i);

    TensorT<T> dh2;
    if (m.feature_tnet) {
        const std::int64_t kk = m.feature_tnet->k;
        // hf = h2 * A; reg = reg_weight/b * sum ||I - A A^T||^2
        TensorT<T> da;
        detail::bmm_backward(tr.h2, tr.a64, dlocal, dh2, da);

        double reg = 0.0;  // gradient contributions from both paths follow
        TensorT<T> e({kk, kk});
        for (std::int64_t i = 0; i < b; ++i) {
            const T* ap = tr.a64.data() + i * kk * kk;
            // E = A A^T - I
            for (std::int64_t r = 0; r < kk; ++r) {
                for (std::int64_t c = 0; c < kk; ++c) {
                    double aat = 0.0;
                    for (std::int64_t p = 0; p < kk; ++p) {
                        aat += static_cast<double>(ap[r * kk + p]) * static_cast<double>(ap[c * kk + p]);
                    }
                    const double val = aat - (r == c ? 1.0 : 0.0);
                    e(r, c) = static_cast<T>(val);
                    reg += val * val;
                }
            }
            // dA += (4 * reg_weight / b) * E * A
            T* dap = da.data() + i * kk * kk;
            const T scale = static_cast<T>(4.0 * reg_weight / static_cast<double>(b));
            for (std::int64_t r = 0; r < kk; ++r) {
                for (std::int64_t c = 0; c < kk; ++c) {
                    T acc = T(0);
                    for (std::int64_t p = 0; p < kk; ++p) acc += e(r, p) * ap[p * kk + c];
                    dap[r * kk + c] += scale * acc;
                }
            }
        }
        result.reg = reg / static_cast<double>(b);
        TensorT<T> dh2_tnet;
        detail::tnet_backward(*m.feature_tnet, tr.h2, tr.tnetf, da, dh2_tnet);
        for (std::int64_t i = 0; i < dh2.size(); ++i) dh2(i) += dh2_tnet(i);
    } else {
        dh2 = std::move(dlocal);
    }

    relu_backward_inplace(tr.h2, dh2);
    TensorT<T> dh1, dx1;
    conv1d_k1_backward(tr.h1, m.mlp1_1.w.value, dh2, dh1, m.mlp1_1.w.grad, m.mlp1_1.b.grad);
    relu_backward_inplace(tr.h1, dh1);
    const TensorT<T>& first_in = m.input_tnet ? tr.x1 : x;
    conv1d_k1_backward(first_in, m.mlp1_0.w.value, dh1, dx1, m.mlp1_0.w.grad, m.mlp1_0.b.grad);

    if (m.input_tnet) {
        TensorT<T> dspatial_out, dextra;
        concat_backward(dx1, 2, 3, dspatial_out, dextra);
        TensorT<T> dspatial_in, da3;
        detail::bmm_backward(tr.spatial_in, tr.a3, dspatial_out, dspatial_in, da3);
        TensorT<T> dspatial_tnet;
        detail::tnet_backward(*m.input_tnet, tr.spatial_in, tr.tnet3, da3, dspatial_tnet);
        // gradient wrt the network input is not needed further
    }

    result.total = result.ce + reg_weight * result.reg;
    return result;
}

struct AdamOptions {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <typename T>
void adam_step(std::vector<ParamT<T>*> params, const AdamOptions& opt, std::int64_t t) {
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(t));
    for (ParamT<T>* p : params) {
        T* value = p->value.data();
        const T* grad = p->grad.data();
        T* mm = p->m.data();
        T* vv = p->v.data();
        for (std::int64_t i = 0; i < p->value.size(); ++i) {
            const double g = static_cast<double>(grad[i]);
            const double m1 = opt.beta1 * static_cast<double>(mm[i]) + (1.0 - opt.beta1) * g;
            const double v1 = opt.beta2 * static_cast<double>(vv[i]) + (1.0 - opt.beta2) * g * g;
            mm[i] = static_cast<T>(m1);
            vv[i] = static_cast<T>(v1);
            const double mhat = m1 / bc1;
            const double vhat = v1 / bc2;
            value[i] = static_cast<T>(static_cast<double>(value[i]) -
                                      opt.lr * mhat / (std::sqrt(vhat) + opt.eps));
        }
    }
}

struct TrainOptions {
    AdamOptions adam;
    int batch = 32;
    int max_epochs = 100;
    int patience = 10;          ///< early stop after this many non-improving epochs
    double min_delta = 1e-4;    ///< required val-loss improvement
    double reg_weight = 1e-3;
    double stop_val_accuracy = -1.0;  ///< stop once reached (disabled when < 0)
    bool verbose = false;
};

/// Assembles one (b, pc, features) batch from samples by index.
template <typename T>
void assemble_batch(std::span<const Sample> samples, std::span<const std::size_t> idx,
                    TensorT<T>& x, std::vector<std::uint8_t>& labels) {
    if (idx.empty()) throw ConfigError("empty batch");
    const std::int64_t n = samples[idx[0]].pc();
    const std::int64_t f = kSampleFeatures;
    const auto b = static_cast<std::int64_t>(idx.size());
    if (x.ndim() != 3 || x.dim(0) != b || x.dim(1) != n || x.dim(2) != f) x.reset({b, n, f});
    labels.clear();
    labels.reserve(static_cast<std::size_t>(b * n));
    for (std::int64_t i = 0; i < b; ++i) {
        const Sample& s = samples[idx[static_cast<std::size_t>(i)]];
        if (s.pc() != n) throw DataError("batch mixes point counts");
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t ft = 0; ft < f; ++ft) {
                x(i, p, ft) = static_cast<T>(s.points(p, ft));
            }
            labels.push_back(s.labels[static_cast<std::size_t>(p)]);
        }
    }
}

/// Per-point class predictions (codes 1..num_classes) for one sample's
/// feature matrix (pc x features). Ties resolve to the lowest class code.
std::vector<std::uint8_t> predict(const Model& model, const Tensor& features);

/// Batched evaluation over samples: returns per-point predictions per sample.
std::vector<std::vector<std::uint8_t>> predict_batch(const Model& model,
                                                     std::span<const Sample> samples,
                                                     int batch = 32);

struct EvalStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Mean loss and point accuracy over a sample set.
EvalStats evaluate(const Model& model, std::span<const Sample> samples, double reg_weight,
                   int batch = 32);

/// Trains a model on the split with Adam. Deterministic for a fixed seed
/// (single-threaded). Early-stops when the validation loss fails to improve
/// by more than min_delta for `patience` epochs, or when stop_val_accuracy
/// is reached. Epoch history (including the running best validation loss) is
/// recorded in the returned model.
Model train(const NetworkConfig& config, const DatasetSplit& split, const TrainOptions& options,
            std::uint64_t seed);

}  // namespace radarseg
