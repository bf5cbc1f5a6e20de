// Micro-benchmark harness for the tensor kernels: times every registered
// implementation of an operator on one shape, after certifying that all
// implementations produce equivalent outputs (max abs diff <= 1e-6 against
// the first one). If any implementation disagrees, no timings are reported.
//
// Certified rows all carry the checksum of the reference output, so rows of
// the same run compare equal by construction.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radarseg/common.hpp"

namespace radarseg {

/// Thrown when implementations of one op disagree beyond tolerance. The CLI
/// maps this to exit code 4.
class BenchMismatchError : public std::runtime_error {
public:
    explicit BenchMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct BenchReport {
    std::string op;
    std::string impl;
    std::string shape;
    double median_us = 0.0;
    double mean_us = 0.0;
    int reps = 0;
    double checksum = 0.0;
};

/// Benchmarkable ops and their shape parameters (all dims positive):
///   matmul     m,k,n                 impls: blocked, naive
///   conv1d     b,n,c_in,c_out        impls: matmul, naive
///   maxpool    b,n,c                 impls: fast, naive
///   softmax    b,n,c                 impls: fused, naive
///   concat     b,n,c_a,c_b (axis 2)  impls: blockcopy, naive
///   broadcast  b,n,c (times 1x1xc)   impls: fast, naive
std::vector<std::string> bench_ops();
std::vector<std::string> bench_impls(const std::string& op);

/// Runs `reps` timed repetitions (>= 10) of each implementation on one shape.
/// `impls` empty means all registered implementations of the op.
std::vector<BenchReport> run_bench(const std::string& op, const std::vector<std::int64_t>& shape,
                                   int reps, std::uint64_t seed,
                                   std::vector<std::string> impls = {});

std::string bench_csv(const std::vector<BenchReport>& reports, std::uint64_t config_hash);

}  // namespace radarseg
