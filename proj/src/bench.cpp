#include "radarseg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

#include "radarseg/tensor.hpp"

namespace radarseg {

namespace {

constexpr double kEquivTol = 1e-6;

Tensor random_tensor(std::vector<std::int64_t> dims, std::mt19937_64& rng) {
    Tensor t(std::move(dims));
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    for (std::int64_t i = 0; i < t.size(); ++i) t(i) = d(rng);
    return t;
}

struct OpSetup {
    std::vector<std::string> impls;
    // Returns a runnable closure per impl; the closure writes into `out`.
    std::function<std::function<void(Tensor&)>(const std::string&)> make;
};

void expect_dims(const std::string& op, const std::vector<std::int64_t>& shape, std::size_t n) {
    if (shape.size() != n) {
        throw ConfigError("bench op '" + op + "' expects " + std::to_string(n) + " shape dims");
    }
    for (auto d : shape) {
        if (d <= 0) throw ConfigError("bench shape dims must be positive");
    }
}

}  // namespace

std::vector<std::string> bench_ops() {
    return {"matmul", "conv1d", "maxpool", "softmax", "concat", "broadcast"};
}

std::vector<std::string> bench_impls(const std::string& op) {
    if (op == "matmul") return {"blocked", "naive"};
    if (op == "conv1d") return {"matmul", "naive"};
    if (op == "maxpool") return {"fast", "naive"};
    if (op == "softmax") return {"fused", "naive"};
    if (op == "concat") return {"blockcopy", "naive"};
    if (op == "broadcast") return {"fast", "naive"};
    throw ConfigError("unknown bench op: " + op);
}

std::vector<BenchReport> run_bench(const std::string& op, const std::vector<std::int64_t>& shape,
                                   int reps, std::uint64_t seed, std::vector<std::string> impls) {
    if (reps < 10) throw ConfigError("bench reps must be >= 10, got " + std::to_string(reps));
    if (impls.empty()) impls = bench_impls(op);
    const std::vector<std::string> known = bench_impls(op);
    for (const auto& i : impls) {
        if (std::find(known.begin(), known.end(), i) == known.end()) {
            throw ConfigError("unknown impl '" + i + "' for bench op " + op);
        }
    }

    std::mt19937_64 rng(mix_seed(seed, fnv1a(op)));

    // Inputs are built once; each closure recomputes the full op into its
    // output tensor.
    std::function<void(const std::string&, Tensor&)> run;
    if (op == "matmul") {
        expect_dims(op, shape, 3);
        auto a = random_tensor({shape[0], shape[1]}, rng);
        auto b = random_tensor({shape[1], shape[2]}, rng);
        run = [a, b](const std::string& impl, Tensor& out) {
            matmul_into(out, a, b, impl == "blocked" ? MatmulImpl::Blocked : MatmulImpl::Naive);
        };
    } else if (op == "conv1d") {
        expect_dims(op, shape, 4);
        auto x = random_tensor({shape[0], shape[1], shape[2]}, rng);
        auto w = random_tensor({shape[2], shape[3]}, rng);
        auto bias = random_tensor({shape[3]}, rng);
        run = [x, w, bias](const std::string& impl, Tensor& out) {
            conv1d_k1_into(out, x, w, bias, impl == "matmul" ? ConvImpl::Matmul : ConvImpl::Naive);
        };
    } else if (op == "maxpool") {
        expect_dims(op, shape, 3);
        auto x = random_tensor({shape[0], shape[1], shape[2]}, rng);
        run = [x](const std::string& impl, Tensor& out) {
            TensorT<std::int32_t> argmax;
            maxpool_points(x, out, argmax, impl == "fast" ? PoolImpl::Fast : PoolImpl::Naive);
        };
    } else if (op == "softmax") {
        expect_dims(op, shape, 3);
        auto x = random_tensor({shape[0], shape[1], shape[2]}, rng);
        run = [x](const std::string& impl, Tensor& out) {
            softmax_into(out, x, impl == "fused" ? SoftmaxImpl::Fused : SoftmaxImpl::Naive);
        };
    } else if (op == "concat") {
        expect_dims(op, shape, 4);
        auto a = random_tensor({shape[0], shape[1], shape[2]}, rng);
        auto b = random_tensor({shape[0], shape[1], shape[3]}, rng);
        run = [a, b](const std::string& impl, Tensor& out) {
            out = concat(a, b, 2, impl == "blockcopy" ? ConcatImpl::BlockCopy : ConcatImpl::Naive);
        };
    } else if (op == "broadcast") {
        expect_dims(op, shape, 3);
        auto a = random_tensor({shape[0], shape[1], shape[2]}, rng);
        auto b = random_tensor({std::int64_t(1), std::int64_t(1), shape[2]}, rng);
        run = [a, b](const std::string& impl, Tensor& out) {
            out = broadcast_binop(a, b, BinOp::Mul, impl == "fast" ? BinopImpl::Fast : BinopImpl::Naive);
        };
    } else {
        throw ConfigError("unknown bench op: " + op);
    }

    // Correctness gate before any timing.
    Tensor reference;
    run(impls[0], reference);
    const double ref_checksum = checksum(reference);
    for (std::size_t i = 1; i < impls.size(); ++i) {
        Tensor out;
        run(impls[i], out);
        const double diff = max_abs_diff(reference, out);
        if (diff > kEquivTol) {
            throw BenchMismatchError("bench '" + op + "': impl '" + impls[i] + "' disagrees with '" +
                                     impls[0] + "' by " + std::to_string(diff));
        }
    }

    std::string shape_str;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) shape_str += 'x';
        shape_str += std::to_string(shape[i]);
    }

    std::vector<BenchReport> reports;
    for (const auto& impl : impls) {
        Tensor out;
        run(impl, out);  // warmup + buffer allocation
        std::vector<double> times;
        times.reserve(static_cast<std::size_t>(reps));
        for (int r = 0; r < reps; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            run(impl, out);
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
        }
        std::sort(times.begin(), times.end());
        const double median = times.size() % 2 == 1
                                  ? times[times.size() / 2]
                                  : 0.5 * (times[times.size() / 2 - 1] + times[times.size() / 2]);
        double mean = 0.0;
        for (double t : times) mean += t;
        mean /= static_cast<double>(times.size());
        reports.push_back({op, impl, shape_str, median, mean, reps, ref_checksum});
    }
    return reports;
}

std::string bench_csv(const std::vector<BenchReport>& reports, std::uint64_t config_hash) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "# schema=radarseg.bench.v1 config=%016llx\n",
                  static_cast<unsigned long long>(config_hash));
    std::string out = buf;
    out += "op,impl,shape,median_us,mean_us,reps,checksum\n";
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.3f,%.3f,%d,%.6e\n", r.op.c_str(), r.impl.c_str(),
                      r.shape.c_str(), r.median_us, r.mean_us, r.reps, r.checksum);
        out += buf;
    }
    return out;
}

}  // namespace radarseg
