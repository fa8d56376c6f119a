#include <cmath>
#include <limits>

#include "doctest.h"
#include "lskl/optimize.hpp"

using namespace lskl;

TEST_CASE("Nelder-Mead on a quadratic bowl") {
  const auto f = [](std::span<const double> x) { return (x[0] - 1.0) * (x[0] - 1.0) + 4.0 * (x[1] + 2.0) * (x[1] + 2.0); };
  const std::vector<double> start{5.0, 5.0};
  const auto r = nelder_mead(f, start);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-4));
  CHECK(r.value < 1e-9);
  CHECK(r.final_spread <= 1e-10);
}

TEST_CASE("Nelder-Mead on Rosenbrock") {
  const auto f = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
  };
  NelderMeadOptions opts;
  opts.max_evaluations = 20000;
  opts.ftol = 1e-14;
  const std::vector<double> start{-1.2, 1.0};
  const auto r = nelder_mead(f, start, opts);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Nelder-Mead treats infinite and NaN values as worst") {
  const auto f = [](std::span<const double> x) {
    if (x[0] < 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (x[0] > 10.0) return std::numeric_limits<double>::infinity();
    return (x[0] - 2.0) * (x[0] - 2.0);
  };
  const std::vector<double> start{0.1};
  const auto r = nelder_mead(f, start);
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("Nelder-Mead reports non-convergence on a tight budget") {
  const auto f = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  NelderMeadOptions opts;
  opts.max_evaluations = 10;
  const std::vector<double> start{3.0, 3.0};
  const auto r = nelder_mead(f, start, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations <= 12);
}

TEST_CASE("Brent root") {
  CHECK(brent_root([](double x) { return x * x - 2.0; }, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(brent_root([](double x) { return std::cos(x) - x; }, 0.0, 1.0) ==
        doctest::Approx(0.7390851332151607).epsilon(1e-12));
  CHECK(brent_root([](double x) { return x - 0.25; }, 0.25, 3.0) == 0.25);
  CHECK_THROWS(brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0));
}
