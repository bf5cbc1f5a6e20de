// Minimal dense tensor kernels for point-based networks, each with an
// unoptimized reference implementation and an optimized rewrite:
//
//   matmul            textbook dot-product loop  vs  register-blocked panels
//   conv1d_k1         per-point affine loop      vs  reshape + matmul
//   maxpool_points    channel-outer strided scan vs  point-outer contiguous
//   softmax           three-pass                 vs  fused two-pass
//   concat            per-element index math     vs  contiguous block copies
//   broadcast_binop   generic index math         vs  contiguous fast paths
//
// Kernels are pure over immutable inputs and use a fixed accumulation order
// (ascending inner dimension), so results are reproducible and identical
// between implementations of the same op. Storage is 32-bit float in the
// production pipeline (Tensor alias); the templates also instantiate with
// double for the finite-difference gradient checks in the test suite.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "radarseg/common.hpp"

namespace radarseg {

template <typename T>
class TensorT {
public:
    TensorT() = default;

    explicit TensorT(std::vector<std::int64_t> dims) { reset(std::move(dims)); }
    TensorT(std::initializer_list<std::int64_t> dims)
        : TensorT(std::vector<std::int64_t>(dims)) {}

    static TensorT zeros(std::vector<std::int64_t> dims) { return TensorT(std::move(dims)); }

    void reset(std::vector<std::int64_t> dims) {
        if (dims.empty() || dims.size() > 3) {
            throw ConfigError("tensor rank must be 1..3, got " + std::to_string(dims.size()));
        }
        std::int64_t n = 1;
        for (auto d : dims) {
            if (d < 0) throw ConfigError("negative tensor dimension");
            n *= d;
        }
        dims_ = std::move(dims);
        data_.assign(static_cast<std::size_t>(n), T(0));
    }

    int ndim() const { return static_cast<int>(dims_.size()); }
    std::int64_t dim(int i) const { return dims_[static_cast<std::size_t>(i)]; }
    const std::vector<std::int64_t>& shape() const { return dims_; }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    bool same_shape(const TensorT& o) const { return dims_ == o.dims_; }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator()(std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
    T operator()(std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }
    T& operator()(std::int64_t i, std::int64_t j) {
        return data_[static_cast<std::size_t>(i * dims_[1] + j)];
    }
    T operator()(std::int64_t i, std::int64_t j) const {
        return data_[static_cast<std::size_t>(i * dims_[1] + j)];
    }
    T& operator()(std::int64_t i, std::int64_t j, std::int64_t k) {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    T operator()(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    /// Same buffer reinterpreted with a new shape (element count must match).
    TensorT reshaped(std::vector<std::int64_t> dims) const {
        TensorT out;
        std::int64_t n = 1;
        for (auto d : dims) n *= d;
        if (n != size()) throw ConfigError("reshape element count mismatch");
        out.dims_ = std::move(dims);
        out.data_ = data_;
        return out;
    }

    std::string shape_str() const {
        std::string s;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (i) s += 'x';
            s += std::to_string(dims_[i]);
        }
        return s;
    }

private:
    std::vector<std::int64_t> dims_;
    std::vector<T> data_;
};

using Tensor = TensorT<float>;

/// Sum of all elements accumulated in double. Used as the output checksum in
/// benchmark reports.
template <typename T>
double checksum(const TensorT<T>& t) {
    double s = 0.0;
    const T* p = t.data();
    for (std::int64_t i = 0; i < t.size(); ++i) s += static_cast<double>(p[i]);
    return s;
}

template <typename T>
double max_abs_diff(const TensorT<T>& a, const TensorT<T>& b) {
    if (!a.same_shape(b)) throw ConfigError("max_abs_diff shape mismatch");
    double m = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a(i)) - static_cast<double>(b(i))));
    }
    return m;
}

// ---------------------------------------------------------------------------
// matmul
// ---------------------------------------------------------------------------

enum class MatmulImpl { Blocked, Naive };

namespace detail {

// Textbook i-j-k form: one dot product per output element, column-strided
// access into b.
template <typename T>
void matmul_naive(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t n) {
    for (std::int64_t i = 0; i < m; ++i) {
        const T* ai = a + i * k;
        for (std::int64_t j = 0; j < n; ++j) {
            T acc = T(0);
            for (std::int64_t p = 0; p < k; ++p) acc += ai[p] * b[p * n + j];
            c[i * n + j] = acc;
        }
    }
}

// Cache-blocked with a 4-row register panel. For every output element the
// accumulation over k is still in ascending order, so the result is
// bit-identical to matmul_naive.
template <typename T>
void matmul_blocked(const T* a, const T* b, T* c, std::int64_t m, std::int64_t k, std::int64_t n) {
    constexpr std::int64_t KB = 256, JB = 512;
    for (std::int64_t i = 0; i < m; ++i) std::memset(c + i * n, 0, sizeof(T) * static_cast<std::size_t>(n));
    for (std::int64_t jb = 0; jb < n; jb += JB) {
        const std::int64_t je = std::min(jb + JB, n);
        for (std::int64_t kb = 0; kb < k; kb += KB) {
            const std::int64_t ke = std::min(kb + KB, k);
            std::int64_t i = 0;
            for (; i + 4 <= m; i += 4) {
                T* c0 = c + (i + 0) * n;
                T* c1 = c + (i + 1) * n;
                T* c2 = c + (i + 2) * n;
                T* c3 = c + (i + 3) * n;
                const T* a0 = a + (i + 0) * k;
                const T* a1 = a + (i + 1) * k;
                const T* a2 = a + (i + 2) * k;
                const T* a3 = a + (i + 3) * k;
                for (std::int64_t p = kb; p < ke; ++p) {
                    const T v0 = a0[p], v1 = a1[p], v2 = a2[p], v3 = a3[p];
                    const T* bp = b + p * n;
                    for (std::int64_t j = jb; j < je; ++j) {
                        const T bv = bp[j];
                        c0[j] += v0 * bv;
                        c1[j] += v1 * bv;
                        c2[j] += v2 * bv;
                        c3[j] += v3 * bv;
                    }
                }
            }
            for (; i < m; ++i) {
                T* ci = c + i * n;
                const T* ai = a + i * k;
                for (std::int64_t p = kb; p < ke; ++p) {
                    const T av = ai[p];
                    const T* bp = b + p * n;
                    for (std::int64_t j = jb; j < je; ++j) ci[j] += av * bp[j];
                }
            }
        }
    }
}

}  // namespace detail

template <typename T>
void matmul_into(TensorT<T>& c, const TensorT<T>& a, const TensorT<T>& b,
                 MatmulImpl impl = MatmulImpl::Blocked) {
    if (a.ndim() != 2 || b.ndim() != 2) throw ConfigError("matmul expects 2-D tensors");
    if (a.dim(1) != b.dim(0)) {
        throw ConfigError("matmul inner dimensions disagree: " + a.shape_str() + " * " + b.shape_str());
    }
    const std::int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    if (c.ndim() != 2 || c.dim(0) != m || c.dim(1) != n) c.reset({m, n});
    if (impl == MatmulImpl::Blocked) {
        detail::matmul_blocked(a.data(), b.data(), c.data(), m, k, n);
    } else {
        detail::matmul_naive(a.data(), b.data(), c.data(), m, k, n);
    }
}

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b, MatmulImpl impl = MatmulImpl::Blocked) {
    TensorT<T> c;
    matmul_into(c, a, b, impl);
    return c;
}

template <typename T>
void transpose2d_into(TensorT<T>& out, const TensorT<T>& a) {
    if (a.ndim() != 2) throw ConfigError("transpose2d expects a 2-D tensor");
    const std::int64_t m = a.dim(0), n = a.dim(1);
    if (out.ndim() != 2 || out.dim(0) != n || out.dim(1) != m) out.reset({n, m});
    constexpr std::int64_t B = 32;
    for (std::int64_t ib = 0; ib < m; ib += B) {
        const std::int64_t ie = std::min(ib + B, m);
        for (std::int64_t jb = 0; jb < n; jb += B) {
            const std::int64_t je = std::min(jb + B, n);
            for (std::int64_t i = ib; i < ie; ++i)
                for (std::int64_t j = jb; j < je; ++j) out(j, i) = a(i, j);
        }
    }
}

template <typename T>
TensorT<T> transpose2d(const TensorT<T>& a) {
    TensorT<T> out;
    transpose2d_into(out, a);
    return out;
}

/// dC -> (dA, dB) for C = A*B:  dA = dC * B^T,  dB = A^T * dC.
template <typename T>
void matmul_backward(const TensorT<T>& a, const TensorT<T>& b, const TensorT<T>& dc,
                     TensorT<T>& da, TensorT<T>& db) {
    TensorT<T> bt = transpose2d(b);
    TensorT<T> at = transpose2d(a);
    matmul_into(da, dc, bt);
    matmul_into(db, at, dc);
}

// ---------------------------------------------------------------------------
// conv1d with kernel size 1 (per-point shared MLP)
// ---------------------------------------------------------------------------

enum class ConvImpl { Matmul, Naive };

/// y[b,n,co] = sum_ci x[b,n,ci] * w[ci,co] + bias[co].
///
/// The Matmul path reshapes the input to (b*n) x c_in and multiplies; this is
/// the optimized rewrite of the per-point loop and must agree with it to
/// <= 1e-6 max abs diff.
template <typename T>
void conv1d_k1_into(TensorT<T>& y, const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& bias,
                    ConvImpl impl = ConvImpl::Matmul) {
    if (x.ndim() != 3 || w.ndim() != 2 || bias.ndim() != 1) throw ConfigError("conv1d_k1: bad ranks");
    const std::int64_t b = x.dim(0), n = x.dim(1), ci = x.dim(2), co = w.dim(1);
    if (w.dim(0) != ci) {
        throw ConfigError("conv1d_k1 channel mismatch: input " + x.shape_str() + ", weights " + w.shape_str());
    }
    if (bias.dim(0) != co) throw ConfigError("conv1d_k1 bias length mismatch");
    if (y.ndim() != 3 || y.dim(0) != b || y.dim(1) != n || y.dim(2) != co) y.reset({b, n, co});

    const std::int64_t rows = b * n;
    if (impl == ConvImpl::Matmul) {
        detail::matmul_blocked(x.data(), w.data(), y.data(), rows, ci, co);
        T* yp = y.data();
        const T* bp = bias.data();
        for (std::int64_t r = 0; r < rows; ++r) {
            T* yr = yp + r * co;
            for (std::int64_t j = 0; j < co; ++j) yr[j] += bp[j];
        }
    } else {
        const T* xp = x.data();
        const T* wp = w.data();
        T* yp = y.data();
        for (std::int64_t r = 0; r < rows; ++r) {
            const T* xr = xp + r * ci;
            T* yr = yp + r * co;
            for (std::int64_t j = 0; j < co; ++j) {
                T acc = T(0);
                for (std::int64_t p = 0; p < ci; ++p) acc += xr[p] * wp[p * co + j];
                yr[j] = acc + bias(j);
            }
        }
    }
}

template <typename T>
TensorT<T> conv1d_k1(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& bias,
                     ConvImpl impl = ConvImpl::Matmul) {
    TensorT<T> y;
    conv1d_k1_into(y, x, w, bias, impl);
    return y;
}

/// Gradients for conv1d_k1: dx = dy * w^T, dw = x^T * dy, db = column sums.
template <typename T>
void conv1d_k1_backward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& dy,
                        TensorT<T>& dx, TensorT<T>& dw, TensorT<T>& db) {
    const std::int64_t b = x.dim(0), n = x.dim(1), ci = x.dim(2), co = w.dim(1);
    const std::int64_t rows = b * n;
    if (dx.shape() != x.shape()) dx.reset(x.shape());
    if (dw.shape() != w.shape()) dw.reset(w.shape());
    if (db.ndim() != 1 || db.dim(0) != co) db.reset({co});

    TensorT<T> wt = transpose2d(w);
    detail::matmul_blocked(dy.data(), wt.data(), dx.data(), rows, co, ci);

    TensorT<T> x2d = x.reshaped({rows, ci});
    TensorT<T> xt = transpose2d(x2d);
    detail::matmul_blocked(xt.data(), dy.data(), dw.data(), ci, rows, co);

    db.fill(T(0));
    const T* dyp = dy.data();
    T* dbp = db.data();
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* dyr = dyp + r * co;
        for (std::int64_t j = 0; j < co; ++j) dbp[j] += dyr[j];
    }
}

// ---------------------------------------------------------------------------
// max pool over the point axis
// ---------------------------------------------------------------------------

enum class PoolImpl { Fast, Naive };

/// Per-channel max over points: (b,n,c) -> values (b,c), argmax (b,c).
/// First occurrence wins on ties, for both implementations.
template <typename T>
void maxpool_points(const TensorT<T>& x, TensorT<T>& values, TensorT<std::int32_t>& argmax,
                    PoolImpl impl = PoolImpl::Fast) {
    if (x.ndim() != 3) throw ConfigError("maxpool_points expects (b,n,c)");
    const std::int64_t b = x.dim(0), n = x.dim(1), c = x.dim(2);
    if (n < 1) throw ConfigError("maxpool_points: need at least one point");
    if (values.ndim() != 2 || values.dim(0) != b || values.dim(1) != c) values.reset({b, c});
    if (argmax.ndim() != 2 || argmax.dim(0) != b || argmax.dim(1) != c) argmax.reset({b, c});

    if (impl == PoolImpl::Fast) {
        for (std::int64_t i = 0; i < b; ++i) {
            T* v = values.data() + i * c;
            std::int32_t* am = argmax.data() + i * c;
            const T* row0 = x.data() + (i * n) * c;
            std::memcpy(v, row0, sizeof(T) * static_cast<std::size_t>(c));
            std::memset(am, 0, sizeof(std::int32_t) * static_cast<std::size_t>(c));
            for (std::int64_t p = 1; p < n; ++p) {
                const T* row = x.data() + (i * n + p) * c;
                for (std::int64_t j = 0; j < c; ++j) {
                    if (row[j] > v[j]) {
                        v[j] = row[j];
                        am[j] = static_cast<std::int32_t>(p);
                    }
                }
            }
        }
    } else {
        for (std::int64_t i = 0; i < b; ++i) {
            for (std::int64_t j = 0; j < c; ++j) {
                T best = x(i, 0, j);
                std::int32_t bi = 0;
                for (std::int64_t p = 1; p < n; ++p) {
                    const T v = x(i, p, j);
                    if (v > best) {
                        best = v;
                        bi = static_cast<std::int32_t>(p);
                    }
                }
                values(i, j) = best;
                argmax(i, j) = bi;
            }
        }
    }
}

/// Routes pooled gradients back to the argmax rows; all other rows get zero.
template <typename T>
void maxpool_points_backward(const TensorT<T>& dvalues, const TensorT<std::int32_t>& argmax,
                             std::int64_t n, TensorT<T>& dx) {
    const std::int64_t b = dvalues.dim(0), c = dvalues.dim(1);
    if (dx.ndim() != 3 || dx.dim(0) != b || dx.dim(1) != n || dx.dim(2) != c) dx.reset({b, n, c});
    dx.fill(T(0));
    for (std::int64_t i = 0; i < b; ++i) {
        for (std::int64_t j = 0; j < c; ++j) {
            dx(i, argmax(i, j), j) += dvalues(i, j);
        }
    }
}

// ---------------------------------------------------------------------------
// softmax over the last axis
// ---------------------------------------------------------------------------

enum class SoftmaxImpl { Fused, Naive };

template <typename T>
void softmax_into(TensorT<T>& y, const TensorT<T>& x, SoftmaxImpl impl = SoftmaxImpl::Fused) {
    if (x.ndim() < 1) throw ConfigError("softmax: need at least one axis");
    const std::int64_t k = x.dim(x.ndim() - 1);
    if (k < 1) throw ConfigError("softmax: empty last axis");
    if (!y.same_shape(x)) y.reset(x.shape());
    const std::int64_t rows = x.size() / k;
    const T* xp = x.data();
    T* yp = y.data();
    if (impl == SoftmaxImpl::Fused) {
        for (std::int64_t r = 0; r < rows; ++r) {
            const T* xr = xp + r * k;
            T* yr = yp + r * k;
            T m = xr[0];
            for (std::int64_t j = 1; j < k; ++j) m = std::max(m, xr[j]);
            T sum = T(0);
            for (std::int64_t j = 0; j < k; ++j) {
                const T e = std::exp(xr[j] - m);
                yr[j] = e;
                sum += e;
            }
            const T inv = T(1) / sum;
            for (std::int64_t j = 0; j < k; ++j) yr[j] *= inv;
        }
    } else {
        std::vector<T> e(static_cast<std::size_t>(k));
        for (std::int64_t r = 0; r < rows; ++r) {
            const T* xr = xp + r * k;
            T* yr = yp + r * k;
            T m = xr[0];
            for (std::int64_t j = 1; j < k; ++j) {
                if (xr[j] > m) m = xr[j];
            }
            for (std::int64_t j = 0; j < k; ++j) e[static_cast<std::size_t>(j)] = std::exp(xr[j] - m);
            T sum = T(0);
            for (std::int64_t j = 0; j < k; ++j) sum += e[static_cast<std::size_t>(j)];
            for (std::int64_t j = 0; j < k; ++j) yr[j] = e[static_cast<std::size_t>(j)] / sum;
        }
    }
}

template <typename T>
TensorT<T> softmax(const TensorT<T>& x, SoftmaxImpl impl = SoftmaxImpl::Fused) {
    TensorT<T> y;
    softmax_into(y, x, impl);
    return y;
}

/// dx_i = y_i * (dy_i - sum_j dy_j y_j), rowwise.
template <typename T>
void softmax_backward(const TensorT<T>& y, const TensorT<T>& dy, TensorT<T>& dx) {
    if (!y.same_shape(dy)) throw ConfigError("softmax_backward shape mismatch");
    if (!dx.same_shape(y)) dx.reset(y.shape());
    const std::int64_t k = y.dim(y.ndim() - 1);
    const std::int64_t rows = y.size() / k;
    for (std::int64_t r = 0; r < rows; ++r) {
        const T* yr = y.data() + r * k;
        const T* dyr = dy.data() + r * k;
        T* dxr = dx.data() + r * k;
        T s = T(0);
        for (std::int64_t j = 0; j < k; ++j) s += dyr[j] * yr[j];
        for (std::int64_t j = 0; j < k; ++j) dxr[j] = yr[j] * (dyr[j] - s);
    }
}

// ---------------------------------------------------------------------------
// concat
// ---------------------------------------------------------------------------

enum class ConcatImpl { BlockCopy, Naive };

template <typename T>
TensorT<T> concat(const TensorT<T>& a, const TensorT<T>& b, int axis,
                  ConcatImpl impl = ConcatImpl::BlockCopy) {
    if (a.ndim() != b.ndim()) throw ConfigError("concat rank mismatch");
    if (axis < 0 || axis >= a.ndim()) throw ConfigError("concat axis out of range");
    for (int d = 0; d < a.ndim(); ++d) {
        if (d != axis && a.dim(d) != b.dim(d)) {
            throw ConfigError("concat shapes incompatible: " + a.shape_str() + " | " + b.shape_str());
        }
    }
    std::vector<std::int64_t> dims = a.shape();
    dims[static_cast<std::size_t>(axis)] += b.dim(axis);
    TensorT<T> out(dims);

    std::int64_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= a.dim(d);
    for (int d = axis + 1; d < a.ndim(); ++d) inner *= a.dim(d);
    const std::int64_t ablk = a.dim(axis) * inner;
    const std::int64_t bblk = b.dim(axis) * inner;

    if (impl == ConcatImpl::BlockCopy) {
        for (std::int64_t o = 0; o < outer; ++o) {
            std::memcpy(out.data() + o * (ablk + bblk), a.data() + o * ablk,
                        sizeof(T) * static_cast<std::size_t>(ablk));
            std::memcpy(out.data() + o * (ablk + bblk) + ablk, b.data() + o * bblk,
                        sizeof(T) * static_cast<std::size_t>(bblk));
        }
    } else {
        for (std::int64_t o = 0; o < outer; ++o) {
            for (std::int64_t i = 0; i < ablk; ++i) out(o * (ablk + bblk) + i) = a(o * ablk + i);
            for (std::int64_t i = 0; i < bblk; ++i) out(o * (ablk + bblk) + ablk + i) = b(o * bblk + i);
        }
    }
    return out;
}

/// Backward of concat: splits the incoming gradient back into the two parts.
template <typename T>
void concat_backward(const TensorT<T>& dout, int axis, std::int64_t a_axis_dim,
                     TensorT<T>& da, TensorT<T>& db) {
    std::vector<std::int64_t> adims = dout.shape(), bdims = dout.shape();
    adims[static_cast<std::size_t>(axis)] = a_axis_dim;
    bdims[static_cast<std::size_t>(axis)] = dout.dim(axis) - a_axis_dim;
    if (da.shape() != adims) da.reset(adims);
    if (db.shape() != bdims) db.reset(bdims);
    std::int64_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= dout.dim(d);
    for (int d = axis + 1; d < dout.ndim(); ++d) inner *= dout.dim(d);
    const std::int64_t ablk = a_axis_dim * inner;
    const std::int64_t bblk = (dout.dim(axis) - a_axis_dim) * inner;
    for (std::int64_t o = 0; o < outer; ++o) {
        std::memcpy(da.data() + o * ablk, dout.data() + o * (ablk + bblk),
                    sizeof(T) * static_cast<std::size_t>(ablk));
        std::memcpy(db.data() + o * bblk, dout.data() + o * (ablk + bblk) + ablk,
                    sizeof(T) * static_cast<std::size_t>(bblk));
    }
}

// ---------------------------------------------------------------------------
// broadcasted binary ops
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul };
enum class BinopImpl { Fast, Naive };

namespace detail {

inline std::vector<std::int64_t> broadcast_shape(const std::vector<std::int64_t>& a,
                                                 const std::vector<std::int64_t>& b) {
    const std::size_t nd = std::max(a.size(), b.size());
    std::vector<std::int64_t> out(nd);
    for (std::size_t i = 0; i < nd; ++i) {
        const std::int64_t da = i < nd - a.size() ? 1 : a[i - (nd - a.size())];
        const std::int64_t db = i < nd - b.size() ? 1 : b[i - (nd - b.size())];
        if (da != db && da != 1 && db != 1) throw ConfigError("broadcast shapes incompatible");
        out[i] = std::max(da, db);
    }
    return out;
}

template <typename T>
T apply_binop(T x, T y, BinOp op) {
    switch (op) {
    case BinOp::Add: return x + y;
    case BinOp::Sub: return x - y;
    case BinOp::Mul: return x * y;
    }
    return T(0);
}

}  // namespace detail

/// Elementwise a(op)b with trailing-dimension broadcasting (NumPy rules,
/// ranks up to 3). The Fast path special-cases same-shape and
/// broadcast-over-leading-axes operands into contiguous loops; Naive computes
/// a full multi-index for every element.
template <typename T>
TensorT<T> broadcast_binop(const TensorT<T>& a, const TensorT<T>& b, BinOp op,
                           BinopImpl impl = BinopImpl::Fast) {
    const std::vector<std::int64_t> oshape = detail::broadcast_shape(a.shape(), b.shape());
    TensorT<T> out(oshape);
    const int nd = static_cast<int>(oshape.size());

    // Pad shapes/strides on the left to the output rank.
    std::array<std::int64_t, 3> ad{1, 1, 1}, bd{1, 1, 1}, od{1, 1, 1};
    for (int i = 0; i < nd; ++i) od[static_cast<std::size_t>(3 - nd + i)] = oshape[static_cast<std::size_t>(i)];
    for (int i = 0; i < a.ndim(); ++i) ad[static_cast<std::size_t>(3 - a.ndim() + i)] = a.dim(i);
    for (int i = 0; i < b.ndim(); ++i) bd[static_cast<std::size_t>(3 - b.ndim() + i)] = b.dim(i);
    std::array<std::int64_t, 3> as{}, bs{};
    as[2] = ad[2] == 1 ? 0 : 1;
    as[1] = ad[1] == 1 ? 0 : ad[2];
    as[0] = ad[0] == 1 ? 0 : ad[1] * ad[2];
    bs[2] = bd[2] == 1 ? 0 : 1;
    bs[1] = bd[1] == 1 ? 0 : bd[2];
    bs[0] = bd[0] == 1 ? 0 : bd[1] * bd[2];

    if (impl == BinopImpl::Fast && a.same_shape(b)) {
        const T* ap = a.data();
        const T* bp = b.data();
        T* op_ = out.data();
        for (std::int64_t i = 0; i < out.size(); ++i) op_[i] = detail::apply_binop(ap[i], bp[i], op);
        return out;
    }
    if (impl == BinopImpl::Fast && as[2] == 1 && bs[2] == 1) {
        // Full last axis on both sides: contiguous inner loop.
        for (std::int64_t i = 0; i < od[0]; ++i) {
            for (std::int64_t j = 0; j < od[1]; ++j) {
                const T* ap = a.data() + i * as[0] + j * as[1];
                const T* bp = b.data() + i * bs[0] + j * bs[1];
                T* op_ = out.data() + (i * od[1] + j) * od[2];
                for (std::int64_t l = 0; l < od[2]; ++l) op_[l] = detail::apply_binop(ap[l], bp[l], op);
            }
        }
        return out;
    }
    std::int64_t idx = 0;
    for (std::int64_t i = 0; i < od[0]; ++i) {
        for (std::int64_t j = 0; j < od[1]; ++j) {
            for (std::int64_t l = 0; l < od[2]; ++l) {
                const T av = a.data()[i * as[0] + j * as[1] + l * as[2]];
                const T bv = b.data()[i * bs[0] + j * bs[1] + l * bs[2]];
                out(idx++) = detail::apply_binop(av, bv, op);
            }
        }
    }
    return out;
}

/// Sum-reduce `g` down to `shape` (inverse of broadcasting); used by the
/// gradients of broadcast_binop.
template <typename T>
TensorT<T> reduce_to_shape(const TensorT<T>& g, const std::vector<std::int64_t>& shape) {
    TensorT<T> out(shape);
    const int nd = g.ndim();
    std::array<std::int64_t, 3> gd{1, 1, 1}, od{1, 1, 1};
    for (int i = 0; i < nd; ++i) gd[static_cast<std::size_t>(3 - nd + i)] = g.dim(i);
    const int ond = static_cast<int>(shape.size());
    for (int i = 0; i < ond; ++i) od[static_cast<std::size_t>(3 - ond + i)] = shape[static_cast<std::size_t>(i)];
    std::array<std::int64_t, 3> os{};
    os[2] = od[2] == 1 ? 0 : 1;
    os[1] = od[1] == 1 ? 0 : od[2];
    os[0] = od[0] == 1 ? 0 : od[1] * od[2];
    out.fill(T(0));
    std::int64_t idx = 0;
    for (std::int64_t i = 0; i < gd[0]; ++i) {
        for (std::int64_t j = 0; j < gd[1]; ++j) {
            for (std::int64_t l = 0; l < gd[2]; ++l) {
                out.data()[(i % od[0]) * os[0] + (j % od[1]) * os[1] + (l % od[2]) * os[2]] += g(idx++);
            }
        }
    }
    return out;
}

/// Gradients of broadcast_binop with the reduction back to operand shapes.
template <typename T>
void broadcast_binop_backward(const TensorT<T>& a, const TensorT<T>& b, BinOp op,
                              const TensorT<T>& dout, TensorT<T>& da, TensorT<T>& db) {
    switch (op) {
    case BinOp::Add:
        da = reduce_to_shape(dout, a.shape());
        db = reduce_to_shape(dout, b.shape());
        break;
    case BinOp::Sub: {
        da = reduce_to_shape(dout, a.shape());
        TensorT<T> neg(dout.shape());
        for (std::int64_t i = 0; i < dout.size(); ++i) neg(i) = -dout(i);
        db = reduce_to_shape(neg, b.shape());
        break;
    }
    case BinOp::Mul: {
        TensorT<T> ga = broadcast_binop(dout, b, BinOp::Mul);
        TensorT<T> gb = broadcast_binop(dout, a, BinOp::Mul);
        da = reduce_to_shape(ga, a.shape());
        db = reduce_to_shape(gb, b.shape());
        break;
    }
    }
}

// ---------------------------------------------------------------------------
// relu
// ---------------------------------------------------------------------------

template <typename T>
void relu_into(TensorT<T>& y, const TensorT<T>& x) {
    if (!y.same_shape(x)) y.reset(x.shape());
    const T* xp = x.data();
    T* yp = y.data();
    for (std::int64_t i = 0; i < x.size(); ++i) yp[i] = xp[i] > T(0) ? xp[i] : T(0);
}

template <typename T>
TensorT<T> relu(const TensorT<T>& x) {
    TensorT<T> y;
    relu_into(y, x);
    return y;
}

/// Gate the incoming gradient by the activation output (y > 0), in place.
template <typename T>
void relu_backward_inplace(const TensorT<T>& y, TensorT<T>& dy) {
    if (!y.same_shape(dy)) throw ConfigError("relu_backward shape mismatch");
    const T* yp = y.data();
    T* dp = dy.data();
    for (std::int64_t i = 0; i < y.size(); ++i) {
        if (!(yp[i] > T(0))) dp[i] = T(0);
    }
}

}  // namespace radarseg
