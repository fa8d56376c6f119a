#include "lskl/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lskl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Tally {
  LogRatioStats acc;
  void observe(double lf1, double lf2) {
    if (lf1 == kNegInf) {
      acc.outside_f1 = true;
      return;
    }
    if (lf2 == kNegInf) {
      acc.outside_f2 = true;
      return;
    }
    acc.stats.push(lf1 - lf2);
  }
  void merge(const LogRatioStats& other) {
    acc.stats.merge(other.stats);
    acc.outside_f1 = acc.outside_f1 || other.outside_f1;
    acc.outside_f2 = acc.outside_f2 || other.outside_f2;
  }
};

std::size_t chunk_begin(std::size_t c) { return c * kernels::kChunkSize; }
std::size_t chunk_end(std::size_t c, std::size_t n) { return std::min(n, (c + 1) * kernels::kChunkSize); }

}  // namespace

void RunningStats::merge(const RunningStats& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count);
  const double nb = static_cast<double>(other.count);
  const double n = na + nb;
  const double delta = other.mean - mean;
  mean += delta * nb / n;
  m2 += other.m2 + delta * delta * na * nb / n;
  count += other.count;
}

double RunningStats::standard_error() const {
  return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

namespace kernels {

std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

void draw_chunked(const ModelInstance& m, std::size_t n, std::uint64_t seed, std::span<double> out) {
  const std::size_t chunks = chunk_count(n);
  for (std::size_t c = 0; c < chunks; ++c) {
    DrawStream stream(seed, c);
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, n); ++i) out[i] = stream.draw(m);
  }
}

LogRatioStats log_ratio_draws_serial(const ModelInstance& f1, const ModelInstance& f2, std::size_t n,
                                     std::uint64_t seed) {
  Tally tally;
  const std::size_t chunks = chunk_count(n);
  for (std::size_t c = 0; c < chunks; ++c) {
    DrawStream stream(seed, c);
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, n); ++i) {
      const double x = stream.draw(f1);
      tally.observe(log_density(f1, x), log_density(f2, x));
    }
  }
  return tally.acc;
}

LogRatioStats log_ratio_draws_parallel(const ModelInstance& f1, const ModelInstance& f2, std::size_t n,
                                       std::uint64_t seed) {
  const std::size_t chunks = chunk_count(n);
  std::vector<LogRatioStats> partial(chunks);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t c = 0; c < chunks; ++c) {
    DrawStream stream(seed, c);
    Tally local;
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, n); ++i) {
      const double x = stream.draw(f1);
      local.observe(log_density(f1, x), log_density(f2, x));
    }
    partial[c] = local.acc;
  }
  Tally total;
  for (const auto& p : partial) total.merge(p);
  return total.acc;
}

LogRatioStats log_ratio_data_serial(std::span<const double> data, const ModelInstance& f1,
                                    const ModelInstance& f2) {
  Tally tally;
  for (double x : data) tally.observe(log_density(f1, x), log_density(f2, x));
  return tally.acc;
}

LogRatioStats log_ratio_data_parallel(std::span<const double> data, const ModelInstance& f1,
                                      const ModelInstance& f2) {
  const std::size_t n = data.size();
  const std::size_t chunks = chunk_count(n);
  std::vector<LogRatioStats> partial(chunks);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    Tally local;
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, n); ++i) {
      local.observe(log_density(f1, data[i]), log_density(f2, data[i]));
    }
    partial[c] = local.acc;
  }
  Tally total;
  for (const auto& p : partial) total.merge(p);
  return total.acc;
}

double log_likelihood_serial(std::span<const double> data, const ModelInstance& m) {
  double sum = 0.0;
  for (double x : data) {
    const double lf = log_density(m, x);
    if (lf == kNegInf) return kNegInf;
    sum += lf;
  }
  return sum;
}

double log_likelihood_parallel(std::span<const double> data, const ModelInstance& m) {
  const std::size_t n = data.size();
  const std::size_t chunks = chunk_count(n);
  if (chunks <= 1) return log_likelihood_serial(data, m);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    double s = 0.0;
    for (std::size_t i = chunk_begin(c); i < chunk_end(c, n); ++i) s += log_density(m, data[i]);
    partial[c] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum;
}

}  // namespace kernels
}  // namespace lskl
