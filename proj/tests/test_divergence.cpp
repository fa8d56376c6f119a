#include <cmath>
#include <numbers>

#include "doctest.h"
#include "lskl/constants.hpp"
#include "lskl/divergence.hpp"
#include "lskl/error.hpp"
#include "oracles.hpp"
#include "registry_cases.hpp"

using namespace lskl;

TEST_CASE("closed-form examples") {
  const auto a = kl_closed_form(ModelInstance::half_normal(1.0), ModelInstance::exponential(std::sqrt(2.0 / kPi)));
  REQUIRE(a);
  CHECK(a->method == KLMethod::kClosedForm);
  CHECK(a->value == doctest::Approx(std::log(2.0 / kPi) + 0.5).epsilon(1e-14));
  CHECK(a->value == doctest::Approx(0.0484).epsilon(1e-3));

  const auto b = kl_closed_form(ModelInstance::exponential(1.0), ModelInstance::half_normal(1.0));
  REQUIRE(b);
  CHECK(b->value == doctest::Approx(-0.5 * std::log(2.0 / kPi)).epsilon(1e-14));
  CHECK(b->value == doctest::Approx(0.2258).epsilon(1e-4));

  for (const auto& m : {ModelInstance::normal(1.0, 2.0), ModelInstance::exponential(3.0),
                        ModelInstance::half_normal(0.4), ModelInstance::log_normal(-1.0, 5.0)}) {
    const auto z = kl_closed_form(m, m);
    REQUIRE(z);
    CHECK(z->value == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("closed form matches hand-written oracles") {
  for (double s : {0.3, 1.0, 4.0}) {
    for (double b : {0.5, 2.0}) {
      CHECK(kl_closed_form(ModelInstance::half_normal(s), ModelInstance::exponential(b))->value ==
            doctest::Approx(oracle::kl_halfnormal_exponential(s, b)).epsilon(1e-13));
      CHECK(kl_closed_form(ModelInstance::exponential(s), ModelInstance::half_normal(b))->value ==
            doctest::Approx(oracle::kl_exponential_halfnormal(s, b)).epsilon(1e-13));
    }
  }
  CHECK(kl_closed_form(ModelInstance::normal(0.0, 1.0), ModelInstance::normal(1.0, 1.0))->value ==
        doctest::Approx(0.5));
}

TEST_CASE("closed form is absent outside the registry and across shifts") {
  CHECK_FALSE(kl_closed_form(ModelInstance::normal(0.0, 1.0), ModelInstance::logistic(0.0, 1.0)));
  CHECK_FALSE(kl_closed_form(ModelInstance::gumbel_min(0.0, 1.0), ModelInstance::gumbel_min(0.0, 2.0)));
  CHECK_FALSE(kl_closed_form(ModelInstance::exponential(1.0), ModelInstance::exponential(1.0, 1.0)));
}

TEST_CASE("quadrature examples") {
  const auto a = kl_quadrature(ModelInstance::half_normal(3.0), ModelInstance::exponential(1.0));
  const double oracle_a = 3.0 * std::sqrt(2.0 / kPi) - std::log(3.0) + 0.5 * std::log(2.0 / kPi) - 0.5;
  CHECK(a.method == KLMethod::kQuadrature);
  CHECK(std::fabs(a.value - oracle_a) < 1e-8);
  CHECK(std::fabs(a.value - 0.56925) < 1e-5);
  REQUIRE(a.error_bound);
  CHECK(*a.error_bound <= 1e-8);

  const auto b = kl_quadrature(ModelInstance::normal(0.0, 1.0), ModelInstance::normal(1.0, 1.0));
  CHECK(std::fabs(b.value - 0.5) < 1e-8);

  const auto c = kl_quadrature(ModelInstance::exponential(1.0), ModelInstance::exponential(1.0, 1.0));
  CHECK(c.value == INFINITY);
  CHECK(c.support_violation);
  CHECK_FALSE(c.finite());

  CHECK_THROWS_AS(kl_quadrature(ModelInstance::normal(0.0, 1.0), ModelInstance::normal(0.0, 1.0), 0.0), Error);
}

TEST_CASE("quadrature against a Simpson oracle off the registry") {
  const auto f1 = ModelInstance::logistic(0.3, 1.2);
  const auto f2 = ModelInstance::gumbel_min(-0.1, 1.5);
  const double ref = oracle::simpson(
      [&](double x) {
        const double p = std::exp(log_density(f1, x));
        return p == 0.0 ? 0.0 : p * (log_density(f1, x) - log_density(f2, x));
      },
      -80.0, 200.0, 1000000);
  CHECK(std::fabs(kl_quadrature(f1, f2).value - ref) < 1e-8);
}

TEST_CASE("Monte Carlo examples") {
  const auto a = kl_monte_carlo(ModelInstance::half_normal(1.0), ModelInstance::exponential(std::sqrt(2.0 / kPi)),
                                1000000, 7);
  REQUIRE(a.error_bound);
  CHECK(a.n_used == 1000000u);
  CHECK(std::fabs(a.value - (std::log(2.0 / kPi) + 0.5)) < 4.0 * *a.error_bound);

  const auto same = kl_monte_carlo(ModelInstance::weibull(1.0, 2.0), ModelInstance::weibull(1.0, 2.0), 1000, 1);
  CHECK(same.value == 0.0);
  CHECK(*same.error_bound == 0.0);

  const auto b = kl_monte_carlo(ModelInstance::log_normal(0.0, 1.0), ModelInstance::weibull(std::exp(0.5), 1.0),
                                1000000, 8);
  CHECK(std::fabs(b.value - (1.0 - 0.5 * std::log(2.0 * kPi))) < 4.0 * *b.error_bound);

  CHECK_THROWS_AS(kl_monte_carlo(ModelInstance::normal(0.0, 1.0), ModelInstance::normal(0.0, 1.0), 99), Error);
  const auto c = kl_monte_carlo(ModelInstance::normal(0.0, 1.0), ModelInstance::half_normal(1.0), 1000, 1);
  CHECK(c.value == INFINITY);
  CHECK(c.support_violation);
}

TEST_CASE("Monte Carlo is deterministic per seed") {
  const auto f1 = ModelInstance::gumbel_min(0.0, 1.0);
  const auto f2 = ModelInstance::normal(0.0, 1.5);
  CHECK(kl_monte_carlo(f1, f2, 50000, 3).value == kl_monte_carlo(f1, f2, 50000, 3).value);
  CHECK(kl_monte_carlo(f1, f2, 50000, 3).value != kl_monte_carlo(f1, f2, 50000, 4).value);
}

TEST_CASE("sample KL examples") {
  const auto hn = ModelInstance::half_normal(1.0);
  const auto ex = ModelInstance::exponential(std::sqrt(2.0 / kPi));
  const Dataset d = sample(hn, 100000, 21);
  CHECK(sample_kl(d, hn, hn).value == 0.0);
  const auto v = sample_kl(d, hn, ex);
  CHECK(v.method == KLMethod::kSample);
  CHECK(v.n_used == d.size());
  CHECK(std::fabs(v.value - (std::log(2.0 / kPi) + 0.5)) < 4.0 * *v.error_bound);

  const Dataset one{{1.0}, std::nullopt, ""};
  CHECK(sample_kl(one, ModelInstance::exponential(1.0), ModelInstance::exponential(2.0)).value ==
        doctest::Approx(std::log(2.0) - 0.5).epsilon(1e-14));
}

TEST_CASE("sample KL is not clamped and reports support problems") {
  const Dataset d{{0.1, 0.2, 0.15}, std::nullopt, ""};
  CHECK(sample_kl(d, ModelInstance::exponential(1.0), ModelInstance::exponential(0.2)).value < 0.0);
  const Dataset neg{{0.5, -1.0}, std::nullopt, ""};
  try {
    sample_kl(neg, ModelInstance::half_normal(1.0), ModelInstance::normal(0.0, 1.0));
    FAIL("expected mismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDataModelMismatch);
  }
  const auto inf = sample_kl(neg, ModelInstance::normal(0.0, 1.0), ModelInstance::half_normal(1.0));
  CHECK(inf.value == INFINITY);
  CHECK_THROWS_AS(sample_kl(Dataset{}, ModelInstance::half_normal(1.0), ModelInstance::half_normal(1.0)), Error);
}

TEST_CASE("a divergent integral is infinite") {
  // Gumbel-min tail e^{x/b2} against a logistic tail e^{-x/b1} with b2 < b1.
  CHECK(kl_quadrature(ModelInstance::logistic(0.3, 1.2), ModelInstance::gumbel_min(-0.1, 0.9)).value == INFINITY);
}

TEST_CASE("kl dispatches to closed form then quadrature") {
  CHECK(kl(ModelInstance::half_normal(1.0), ModelInstance::exponential(1.0)).method == KLMethod::kClosedForm);
  CHECK(kl(ModelInstance::normal(0.0, 1.0), ModelInstance::logistic(0.0, 1.0)).method == KLMethod::kQuadrature);
}

TEST_CASE("nonnegativity and method agreement on every registry pair") {
  for (const auto& pc : cases::registry_pairs()) {
    std::uint64_t seed = 100;
    for (const auto& [f1, f2] : pc.grid) {
      const KLValue cf = *kl_closed_form(f1, f2);
      const KLValue q = kl_quadrature(f1, f2, 1e-8);
      const KLValue mc = kl_monte_carlo(f1, f2, 200000, seed++);
      CHECK(cf.value >= 0.0);
      CHECK(q.value >= -*q.error_bound);
      CHECK_MESSAGE(std::fabs(cf.value - q.value) <= 4.0 * std::max(*q.error_bound, 1e-10), pc.label);
      CHECK_MESSAGE(std::fabs(cf.value - mc.value) <= 4.0 * *mc.error_bound, pc.label);
    }
  }
}

TEST_CASE("KL is invariant under the log map") {
  for (double mu : {-1.0, 0.5}) {
    for (double tau : {0.5, 4.0}) {
      for (double lambda : {0.8, 2.0}) {
        for (double kappa : {0.7, 3.0}) {
          const double direct =
              kl_quadrature(ModelInstance::log_normal(mu, tau), ModelInstance::weibull(lambda, kappa)).value;
          const double mapped = kl_quadrature(ModelInstance::normal(mu, 1.0 / std::sqrt(tau)),
                                              ModelInstance::gumbel_min(std::log(lambda), 1.0 / kappa))
                                    .value;
          CHECK(std::fabs(direct - mapped) <= 2e-8);
        }
      }
    }
  }
}

TEST_CASE("sample KL converges on every registry pair") {
  std::uint64_t seed = 500;
  for (const auto& pc : cases::registry_pairs()) {
    const auto& [f1, f2] = pc.grid[4];
    const Dataset d = sample(f1, 100000, seed++);
    const KLValue s = sample_kl(d, f1, f2);
    const KLValue q = kl_quadrature(f1, f2);
    CHECK_MESSAGE(std::fabs(s.value - q.value) <= 4.0 * *s.error_bound, pc.label);
  }
}
