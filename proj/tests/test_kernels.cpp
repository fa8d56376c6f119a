#include <omp.h>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "lskl/kernels.hpp"

using namespace lskl;

namespace {

struct ThreadGuard {
  int saved = omp_get_max_threads();
  ~ThreadGuard() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("chunk counts") {
  CHECK(kernels::chunk_count(1) == 1);
  CHECK(kernels::chunk_count(kernels::kChunkSize) == 1);
  CHECK(kernels::chunk_count(kernels::kChunkSize + 1) == 2);
}

TEST_CASE("RunningStats merge equals a single pass") {
  DrawStream s(4);
  std::vector<double> x(5001);
  for (double& v : x) v = s.standard_normal() * 3.0 + 1.0;
  RunningStats all;
  for (double v : x) all.push(v);
  RunningStats a;
  RunningStats b;
  for (std::size_t i = 0; i < x.size(); ++i) (i < 1234 ? a : b).push(x[i]);
  a.merge(b);
  CHECK(a.count == all.count);
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  RunningStats empty;
  empty.merge(all);
  CHECK(empty.mean == all.mean);
}

TEST_CASE("parallel Monte Carlo kernel matches the serial reference") {
  const auto f1 = ModelInstance::half_normal(1.0);
  const auto f2 = ModelInstance::exponential(1.0);
  for (std::size_t n : {100ul, 16384ul, 50000ul}) {
    const auto s = kernels::log_ratio_draws_serial(f1, f2, n, 9);
    const auto p = kernels::log_ratio_draws_parallel(f1, f2, n, 9);
    CHECK(s.stats.count == n);
    CHECK(p.stats.count == n);
    CHECK(p.stats.mean == doctest::Approx(s.stats.mean).epsilon(1e-12));
    CHECK(p.stats.variance() == doctest::Approx(s.stats.variance()).epsilon(1e-10));
  }
}

TEST_CASE("parallel results do not depend on the thread count") {
  ThreadGuard guard;
  const auto f1 = ModelInstance::weibull(1.0, 2.0);
  const auto f2 = ModelInstance::log_normal(0.0, 1.0);
  Dataset d = sample(f1, 70000, 5);
  omp_set_num_threads(1);
  const auto a = kernels::log_ratio_draws_parallel(f1, f2, 60000, 3);
  const auto la = kernels::log_likelihood_parallel(d.values, f2);
  const auto da = kernels::log_ratio_data_parallel(d.values, f1, f2);
  omp_set_num_threads(4);
  const auto b = kernels::log_ratio_draws_parallel(f1, f2, 60000, 3);
  const auto lb = kernels::log_likelihood_parallel(d.values, f2);
  const auto db = kernels::log_ratio_data_parallel(d.values, f1, f2);
  CHECK(a.stats.mean == b.stats.mean);
  CHECK(a.stats.m2 == b.stats.m2);
  CHECK(la == lb);
  CHECK(da.stats.mean == db.stats.mean);
}

TEST_CASE("data kernels and likelihood match serial twins") {
  const auto f1 = ModelInstance::gumbel_min(0.0, 1.0);
  const auto f2 = ModelInstance::normal(-0.5, 1.3);
  const Dataset d = sample(f1, 40000, 8);
  const auto s = kernels::log_ratio_data_serial(d.values, f1, f2);
  const auto p = kernels::log_ratio_data_parallel(d.values, f1, f2);
  CHECK(p.stats.mean == doctest::Approx(s.stats.mean).epsilon(1e-12));
  const double ls = kernels::log_likelihood_serial(d.values, f2);
  const double lp = kernels::log_likelihood_parallel(d.values, f2);
  CHECK(lp == doctest::Approx(ls).epsilon(1e-12));
  double direct = 0.0;
  for (double x : d.values) direct += log_density(f2, x);
  CHECK(ls == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("support flags and -inf likelihood") {
  const std::vector<double> x{0.5, 1.0, -0.1};
  const auto hn = ModelInstance::half_normal(1.0);
  const auto n = ModelInstance::normal(0.0, 1.0);
  CHECK(kernels::log_likelihood_serial(x, hn) == -INFINITY);
  CHECK(kernels::log_likelihood_parallel(x, hn) == -INFINITY);
  CHECK(kernels::log_ratio_data_serial(x, hn, n).outside_f1);
  CHECK(kernels::log_ratio_data_parallel(x, n, hn).outside_f2);
  const auto r = kernels::log_ratio_draws_parallel(n, hn, 1000, 1);
  CHECK(r.outside_f2);
}
