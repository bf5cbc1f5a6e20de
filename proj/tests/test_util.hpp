// Shared helpers for the test suites: random tensors and the central
// finite-difference gradient oracle (step 1e-3). Gradient checks run in
// double precision; the step size would drown in float rounding noise.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "radarseg/tensor.hpp"

namespace radarseg::testutil {

inline TensorT<double> random_tensor_d(std::vector<std::int64_t> dims, std::mt19937_64& rng,
                                       double lo = -1.0, double hi = 1.0) {
    TensorT<double> t(std::move(dims));
    std::uniform_real_distribution<double> d(lo, hi);
    for (std::int64_t i = 0; i < t.size(); ++i) t(i) = d(rng);
    return t;
}

inline Tensor random_tensor_f(std::vector<std::int64_t> dims, std::mt19937_64& rng,
                              float lo = -1.0f, float hi = 1.0f) {
    Tensor t(std::move(dims));
    std::uniform_real_distribution<float> d(lo, hi);
    for (std::int64_t i = 0; i < t.size(); ++i) t(i) = d(rng);
    return t;
}

/// Central finite differences of a scalar function wrt one tensor.
inline TensorT<double> fd_gradient(TensorT<double>& x, const std::function<double()>& f,
                                   double h = 1e-3) {
    TensorT<double> g(x.shape());
    for (std::int64_t i = 0; i < x.size(); ++i) {
        const double keep = x(i);
        x(i) = keep + h;
        const double up = f();
        x(i) = keep - h;
        const double down = f();
        x(i) = keep;
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Largest per-element error scaled by the gradient magnitude:
/// max_i |a_i - b_i| / max(||a||_inf, ||b||_inf, floor).
inline double scaled_gradient_error(const TensorT<double>& analytic, const TensorT<double>& fd,
                                    double floor = 1e-8) {
    double scale = floor;
    for (std::int64_t i = 0; i < analytic.size(); ++i) {
        scale = std::max(scale, std::abs(analytic(i)));
        scale = std::max(scale, std::abs(fd(i)));
    }
    double worst = 0.0;
    for (std::int64_t i = 0; i < analytic.size(); ++i) {
        worst = std::max(worst, std::abs(analytic(i) - fd(i)) / scale);
    }
    return worst;
}

}  // namespace radarseg::testutil
