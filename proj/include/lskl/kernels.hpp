#pragma once

// Data-parallel reductions behind the Monte Carlo, sample-KL and likelihood
// code. Each *_parallel kernel has a plain single-pass *_serial twin that the
// tests and benchmarks compare against.
//
// Parallel kernels split work into fixed-size chunks; chunk c of a Monte Carlo
// run draws from DrawStream(seed, c), and chunk partials are merged in chunk
// order, so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <span>

#include "lskl/distributions.hpp"

namespace lskl {

// Welford accumulator with Chan's pairwise merge.
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  void merge(const RunningStats& other);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double standard_error() const;
};

struct LogRatioStats {
  RunningStats stats;
  // Some point had f1 > 0 and f2 = 0.
  bool outside_f2 = false;
  // Some data point had f1 = 0 (only meaningful for data kernels).
  bool outside_f1 = false;
};

namespace kernels {

inline constexpr std::size_t kChunkSize = 1 << 14;

std::size_t chunk_count(std::size_t n);

// log f1(X) - log f2(X) over n draws X ~ f1.
LogRatioStats log_ratio_draws_serial(const ModelInstance& f1, const ModelInstance& f2, std::size_t n,
                                     std::uint64_t seed);
LogRatioStats log_ratio_draws_parallel(const ModelInstance& f1, const ModelInstance& f2, std::size_t n,
                                       std::uint64_t seed);

// Chunked draws used by the serial reference: same streams as the parallel kernel.
void draw_chunked(const ModelInstance& m, std::size_t n, std::uint64_t seed, std::span<double> out);

// log f1(x_i) - log f2(x_i) over a dataset.
LogRatioStats log_ratio_data_serial(std::span<const double> data, const ModelInstance& f1,
                                    const ModelInstance& f2);
LogRatioStats log_ratio_data_parallel(std::span<const double> data, const ModelInstance& f1,
                                      const ModelInstance& f2);

// Sum of log f(x_i); -inf as soon as any datum is outside the support.
double log_likelihood_serial(std::span<const double> data, const ModelInstance& m);
double log_likelihood_parallel(std::span<const double> data, const ModelInstance& m);

}  // namespace kernels
}  // namespace lskl
