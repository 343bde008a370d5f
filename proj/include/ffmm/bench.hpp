// ==========================================================================
// ffmm: exact linear algebra kernels over word-size prime fields
// ==========================================================================
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ffmm/field.hpp"
#include "ffmm/multiply.hpp"

namespace ffmm {

struct BenchRecord {
    std::size_t n = 0;
    std::string algorithm;
    std::int64_t modulus = 0;
    double seconds = 0;
    double gfops = 0;  // 2 n^3 / seconds / 1e9, always that formula
    OpCounter ops;
};

enum class BenchFormat { Csv, Markdown };

// One record per (size, algorithm) on random inputs mod p.
std::vector<BenchRecord> run_bench(const std::vector<std::size_t>& sizes,
                                   std::int64_t modulus,
                                   const std::vector<std::string>& algos,
                                   const CascadeConfig& cfg,
                                   std::uint64_t seed = 42);
void print_bench(std::ostream& os, const std::vector<BenchRecord>& records,
                 BenchFormat fmt);

// Timing seam for the threshold tuner: measure(algo, n) returns seconds for
// one n-by-n product with the named algorithm ("classic" or "fast1", one
// recursion level).
using MeasureFn = std::function<double(const std::string&, std::size_t)>;
MeasureFn real_measure(std::int64_t modulus, std::uint64_t seed = 42);

// Doubles sizes from `start` to `max_size` and reports the smallest size
// where the one-level fast product wins twice consecutively; 0 means no
// crossover was observed.
std::size_t tune_threshold(const MeasureFn& measure, std::size_t max_size,
                           std::size_t start = 64);

}  // namespace ffmm
