#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "radarseg/bench.hpp"
#include "radarseg/tensor.hpp"
#include "test_util.hpp"

using namespace radarseg;
using testutil::fd_gradient;
using testutil::random_tensor_d;
using testutil::random_tensor_f;
using testutil::scaled_gradient_error;

TEST_CASE("matmul identity, hand result, zeros") {
    Tensor a({2, 2});
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    Tensor eye({2, 2});
    eye(0, 0) = eye(1, 1) = 1;
    const Tensor ai = matmul(a, eye);
    for (std::int64_t i = 0; i < 4; ++i) CHECK(ai(i) == a(i));

    Tensor b({2, 1});
    b(0, 0) = 5;
    b(1, 0) = 6;
    const Tensor c = matmul(a, b);
    CHECK(c(0, 0) == 17.0f);
    CHECK(c(1, 0) == 39.0f);

    Tensor z({2, 2});
    const Tensor cz = matmul(z, a);
    for (std::int64_t i = 0; i < 4; ++i) CHECK(cz(i) == 0.0f);
}

TEST_CASE("matmul rejects mismatched shapes") {
    Tensor a({2, 3}), b({2, 2});
    CHECK_THROWS_AS(matmul(a, b), ConfigError);
}

TEST_CASE("blocked and naive matmul agree") {
    std::mt19937_64 rng(3);
    for (auto [m, k, n] : {std::array<std::int64_t, 3>{7, 5, 9},
                           {33, 64, 17},
                           {128, 100, 40},
                           {1, 1, 1},
                           {65, 3, 130}}) {
        const Tensor a = random_tensor_f({m, k}, rng);
        const Tensor b = random_tensor_f({k, n}, rng);
        const Tensor c1 = matmul(a, b, MatmulImpl::Blocked);
        const Tensor c2 = matmul(a, b, MatmulImpl::Naive);
        CHECK(max_abs_diff(c1, c2) <= 1e-6);
    }
}

TEST_CASE("conv1d_k1 with identity weights is the identity") {
    std::mt19937_64 rng(5);
    const Tensor x = random_tensor_f({2, 7, 4}, rng);
    Tensor w({4, 4});
    for (int i = 0; i < 4; ++i) w(i, i) = 1.0f;
    Tensor bias({4});
    const Tensor y = conv1d_k1(x, w, bias);
    CHECK(max_abs_diff(x, y) == 0.0);
}

TEST_CASE("conv1d_k1 single point dot product") {
    Tensor x({1, 1, 2});
    x(0) = 1.0f;
    x(1) = 1.0f;
    Tensor w({2, 1});
    w(0, 0) = 2.0f;
    w(1, 0) = 3.0f;
    Tensor bias({1});
    const Tensor y = conv1d_k1(x, w, bias);
    CHECK(y(0) == 5.0f);
}

TEST_CASE("conv1d_k1 matmul path equals the per-point loop and the reshape formula") {
    std::mt19937_64 rng(7);
    const Tensor x = random_tensor_f({4, 256, 5}, rng);
    const Tensor w = random_tensor_f({5, 12}, rng);
    const Tensor bias = random_tensor_f({12}, rng);
    const Tensor fast = conv1d_k1(x, w, bias, ConvImpl::Matmul);
    const Tensor naive = conv1d_k1(x, w, bias, ConvImpl::Naive);
    CHECK(max_abs_diff(fast, naive) <= 1e-6);

    // required equivalence: reshape(input) * weights + bias
    const Tensor x2d = x.reshaped({4 * 256, 5});
    Tensor expect = matmul(x2d, w);
    for (std::int64_t r = 0; r < expect.dim(0); ++r) {
        for (std::int64_t j = 0; j < 12; ++j) expect(r, j) += bias(j);
    }
    CHECK(max_abs_diff(fast, expect.reshaped({4, 256, 12})) <= 1e-6);
}

TEST_CASE("maxpool_points basics") {
    Tensor x({1, 3, 1});
    x(0, 0, 0) = 1.0f;
    x(0, 1, 0) = 5.0f;
    x(0, 2, 0) = 3.0f;
    Tensor values;
    TensorT<std::int32_t> argmax;
    maxpool_points(x, values, argmax);
    CHECK(values(0, 0) == 5.0f);
    CHECK(argmax(0, 0) == 1);

    Tensor one({1, 1, 3});
    one(0) = -2.0f;
    one(1) = 0.0f;
    one(2) = 9.0f;
    maxpool_points(one, values, argmax);
    for (int j = 0; j < 3; ++j) {
        CHECK(values(0, j) == one(j));
        CHECK(argmax(0, j) == 0);
    }
}

TEST_CASE("maxpool_points fast and naive agree including tie handling") {
    std::mt19937_64 rng(11);
    Tensor x = random_tensor_f({3, 40, 8}, rng);
    // plant exact ties
    x(0, 5, 2) = 0.75f;
    x(0, 9, 2) = 0.75f;
    Tensor v1, v2;
    TensorT<std::int32_t> a1, a2;
    maxpool_points(x, v1, a1, PoolImpl::Fast);
    maxpool_points(x, v2, a2, PoolImpl::Naive);
    CHECK(max_abs_diff(v1, v2) == 0.0);
    for (std::int64_t i = 0; i < a1.size(); ++i) CHECK(a1(i) == a2(i));
}

TEST_CASE("softmax closed forms") {
    Tensor x({1, 4});
    const Tensor u = softmax(x);
    for (int j = 0; j < 4; ++j) CHECK(u(0, j) == doctest::Approx(0.25).epsilon(1e-6));

    Tensor two({1, 2});
    two(0, 0) = 0.0f;
    two(0, 1) = std::log(3.0f);
    const Tensor p = softmax(two);
    CHECK(p(0, 0) == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(p(0, 1) == doctest::Approx(0.75).epsilon(1e-5));
}

TEST_CASE("softmax shift invariance, row sums, range, impl agreement") {
    std::mt19937_64 rng(13);
    const Tensor x = random_tensor_f({6, 32, 5}, rng, -4.0f, 4.0f);
    Tensor shifted = x;
    for (std::int64_t i = 0; i < shifted.size(); ++i) shifted(i) += 2.5f;
    const Tensor y = softmax(x);
    const Tensor ys = softmax(shifted);
    CHECK(max_abs_diff(y, ys) <= 1e-6);
    const Tensor yn = softmax(x, SoftmaxImpl::Naive);
    CHECK(max_abs_diff(y, yn) <= 1e-6);
    const std::int64_t rows = y.size() / 5;
    for (std::int64_t r = 0; r < rows; ++r) {
        float sum = 0.0f;
        for (int j = 0; j < 5; ++j) {
            const float v = y(r * 5 + j);
            CHECK(v > 0.0f);
            CHECK(v < 1.0f);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("concat along channels") {
    std::mt19937_64 rng(17);
    const Tensor a = random_tensor_f({2, 3, 64}, rng);
    const Tensor b = random_tensor_f({2, 3, 1024}, rng);
    const Tensor c = concat(a, b, 2);
    CHECK(c.dim(0) == 2);
    CHECK(c.dim(1) == 3);
    CHECK(c.dim(2) == 1088);
    CHECK(c(1, 2, 63) == a(1, 2, 63));
    CHECK(c(1, 2, 64) == b(1, 2, 0));
    const Tensor c2 = concat(a, b, 2, ConcatImpl::Naive);
    CHECK(max_abs_diff(c, c2) == 0.0);

    const Tensor bad = random_tensor_f({2, 4, 8}, rng);
    CHECK_THROWS_AS(concat(a, bad, 2), ConfigError);
    CHECK_THROWS_AS(concat(a, b, 3), ConfigError);
}

TEST_CASE("broadcast_binop identities and channel scaling") {
    std::mt19937_64 rng(19);
    const Tensor x = random_tensor_f({2, 5, 7}, rng);
    Tensor zero({2, 5, 7});
    const Tensor same = broadcast_binop(x, zero, BinOp::Add);
    CHECK(max_abs_diff(same, x) == 0.0);

    const Tensor scale = random_tensor_f({1, 1, 7}, rng);
    const Tensor scaled = broadcast_binop(x, scale, BinOp::Mul);
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 5; ++j) {
            for (std::int64_t l = 0; l < 7; ++l) {
                CHECK(scaled(i, j, l) == x(i, j, l) * scale(0, 0, l));
            }
        }
    }
    const Tensor naive = broadcast_binop(x, scale, BinOp::Mul, BinopImpl::Naive);
    CHECK(max_abs_diff(scaled, naive) == 0.0);

    Tensor bad({2, 5, 3});
    CHECK_THROWS_AS(broadcast_binop(x, bad, BinOp::Add), ConfigError);
}

// ---------------------------------------------------------------------------
// gradient checks (double precision, central differences, step 1e-3)
// ---------------------------------------------------------------------------

namespace {

// Scalar objective: weighted sum of the op output with fixed random weights.
TensorT<double> projection_weights(const std::vector<std::int64_t>& dims, std::mt19937_64& rng) {
    return random_tensor_d(dims, rng);
}

double project(const TensorT<double>& y, const TensorT<double>& w) {
    double s = 0.0;
    for (std::int64_t i = 0; i < y.size(); ++i) s += y(i) * w(i);
    return s;
}

}  // namespace

TEST_CASE("gradcheck: matmul") {
    std::mt19937_64 rng(23);
    TensorT<double> a = random_tensor_d({4, 6}, rng);
    TensorT<double> b = random_tensor_d({6, 3}, rng);
    const TensorT<double> w = projection_weights({4, 3}, rng);

    TensorT<double> da, db;
    matmul_backward(a, b, w, da, db);

    const auto fa = fd_gradient(a, [&] { return project(matmul(a, b), w); });
    const auto fb = fd_gradient(b, [&] { return project(matmul(a, b), w); });
    CHECK(scaled_gradient_error(da, fa) <= 1e-3);
    CHECK(scaled_gradient_error(db, fb) <= 1e-3);
}

TEST_CASE("gradcheck: conv1d_k1") {
    std::mt19937_64 rng(29);
    TensorT<double> x = random_tensor_d({2, 5, 4}, rng);
    TensorT<double> w = random_tensor_d({4, 3}, rng);
    TensorT<double> bias = random_tensor_d({3}, rng);
    const TensorT<double> proj = projection_weights({2, 5, 3}, rng);

    TensorT<double> dx, dw, db;
    conv1d_k1_backward(x, w, proj, dx, dw, db);

    auto f = [&] { return project(conv1d_k1(x, w, bias), proj); };
    CHECK(scaled_gradient_error(dx, fd_gradient(x, f)) <= 1e-3);
    CHECK(scaled_gradient_error(dw, fd_gradient(w, f)) <= 1e-3);
    CHECK(scaled_gradient_error(db, fd_gradient(bias, f)) <= 1e-3);
}

TEST_CASE("gradcheck: maxpool routes gradient only to argmax rows") {
    std::mt19937_64 rng(31);
    TensorT<double> x = random_tensor_d({2, 6, 4}, rng);
    const TensorT<double> proj = projection_weights({2, 4}, rng);

    TensorT<double> values, dx;
    TensorT<std::int32_t> argmax;
    maxpool_points(x, values, argmax);
    maxpool_points_backward(proj, argmax, 6, dx);

    auto f = [&] {
        TensorT<double> v;
        TensorT<std::int32_t> am;
        maxpool_points(x, v, am);
        return project(v, proj);
    };
    CHECK(scaled_gradient_error(dx, fd_gradient(x, f)) <= 1e-3);

    // every non-argmax row got exactly zero
    for (std::int64_t i = 0; i < 2; ++i) {
        for (std::int64_t j = 0; j < 4; ++j) {
            for (std::int64_t p = 0; p < 6; ++p) {
                if (p != argmax(i, j)) {
                    CHECK(dx(i, p, j) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("gradcheck: softmax") {
    std::mt19937_64 rng(37);
    TensorT<double> x = random_tensor_d({3, 5}, rng, -2.0, 2.0);
    const TensorT<double> proj = projection_weights({3, 5}, rng);

    TensorT<double> y = softmax(x);
    TensorT<double> dx;
    softmax_backward(y, proj, dx);

    auto f = [&] { return project(softmax(x), proj); };
    CHECK(scaled_gradient_error(dx, fd_gradient(x, f)) <= 1e-3);
}

TEST_CASE("gradcheck: broadcast binops") {
    std::mt19937_64 rng(41);
    for (BinOp op : {BinOp::Add, BinOp::Sub, BinOp::Mul}) {
        TensorT<double> a = random_tensor_d({2, 4, 3}, rng);
        TensorT<double> b = random_tensor_d({1, 1, 3}, rng);
        const TensorT<double> proj = projection_weights({2, 4, 3}, rng);

        TensorT<double> da, db;
        broadcast_binop_backward(a, b, op, proj, da, db);
        auto f = [&] { return project(broadcast_binop(a, b, op), proj); };
        CHECK(scaled_gradient_error(da, fd_gradient(a, f)) <= 1e-3);
        CHECK(scaled_gradient_error(db, fd_gradient(b, f)) <= 1e-3);
    }
}

TEST_CASE("gradcheck: relu and concat") {
    std::mt19937_64 rng(43);
    TensorT<double> x = random_tensor_d({2, 3, 4}, rng);
    // keep values away from the kink where central differences are invalid
    for (std::int64_t i = 0; i < x.size(); ++i) {
        if (std::abs(x(i)) < 0.05) x(i) = 0.1;
    }
    const TensorT<double> proj = projection_weights({2, 3, 4}, rng);
    TensorT<double> y = relu(x);
    TensorT<double> dy = proj;
    relu_backward_inplace(y, dy);
    auto f = [&] { return project(relu(x), proj); };
    CHECK(scaled_gradient_error(dy, fd_gradient(x, f)) <= 1e-3);

    TensorT<double> a = random_tensor_d({2, 3, 2}, rng);
    TensorT<double> b = random_tensor_d({2, 3, 5}, rng);
    const TensorT<double> proj2 = projection_weights({2, 3, 7}, rng);
    TensorT<double> da, db;
    concat_backward(proj2, 2, 2, da, db);
    auto g = [&] { return project(concat(a, b, 2), proj2); };
    CHECK(scaled_gradient_error(da, fd_gradient(a, g)) <= 1e-3);
    CHECK(scaled_gradient_error(db, fd_gradient(b, g)) <= 1e-3);
}

// ---------------------------------------------------------------------------
// bench harness
// ---------------------------------------------------------------------------

TEST_CASE("bench rejects too few reps") {
    CHECK_THROWS_AS(run_bench("matmul", {8, 8, 8}, 0, 1), ConfigError);
    CHECK_THROWS_AS(run_bench("matmul", {8, 8, 8}, 9, 1), ConfigError);
}

TEST_CASE("bench times the same implementation twice with equal checksums") {
    const auto reports = run_bench("softmax", {4, 64, 8}, 10, 1, {"fused", "fused"});
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].checksum == reports[1].checksum);
    CHECK(reports[0].reps == 10);
}

TEST_CASE("bench certifies implementations and reports both") {
    for (const auto& op : bench_ops()) {
        std::vector<std::int64_t> shape;
        if (op == "matmul") shape = {32, 16, 24};
        else if (op == "conv1d") shape = {2, 64, 16, 8};
        else if (op == "concat") shape = {2, 64, 16, 8};
        else shape = {2, 64, 16};
        const auto reports = run_bench(op, shape, 10, 7);
        CHECK(reports.size() == bench_impls(op).size());
        for (const auto& r : reports) {
            CHECK(r.checksum == reports[0].checksum);
            CHECK(r.median_us >= 0.0);
        }
    }
}

TEST_CASE("bench csv layout") {
    const auto reports = run_bench("maxpool", {2, 32, 8}, 10, 3);
    const std::string csv = bench_csv(reports, 0xabcd);
    CHECK(csv.find("# schema=radarseg.bench.v1") != std::string::npos);
    CHECK(csv.find("op,impl,shape,median_us,mean_us,reps,checksum") != std::string::npos);
    CHECK(csv.find("maxpool,fast,2x32x8,") != std::string::npos);
}
