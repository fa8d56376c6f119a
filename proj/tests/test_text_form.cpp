#include <cmath>
#include <limits>

#include "doctest.h"
#include "lskl/error.hpp"
#include "lskl/text_form.hpp"

using namespace lskl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("model text round trip") {
  for (const auto& m : {ModelInstance::half_normal(2.0), ModelInstance::exponential(1.5, 1.0),
                        ModelInstance::normal(-1.25, 3.0), ModelInstance::weibull(1.0, 2.0, 0.5),
                        ModelInstance::log_normal(0.3, 4.0), ModelInstance::uniform(-1.0, 2.0),
                        ModelInstance::gumbel_min(0.0, 1.0), ModelInstance::logistic(2.0, 0.5)}) {
    CHECK(parse_model(to_text(m)) == m);
  }
  CHECK(to_text(ModelInstance::exponential(1.0, 1.0)) == "exponential(beta=1,shift=1)");
  CHECK(to_text(ModelInstance::half_normal(3.0)) == "halfnormal(sigma=3)");
}

TEST_CASE("parse_model accepts spellings and whitespace") {
  CHECK(parse_model(" half-normal( sigma = 2 ) ") == ModelInstance::half_normal(2.0));
  CHECK(parse_model("Gumbel(a=1,b=2)") == ModelInstance::gumbel_min(1.0, 2.0));
  CHECK(parse_model("weibull(kappa=2,lambda=1)") == ModelInstance::weibull(1.0, 2.0));
}

TEST_CASE("parse_model errors") {
  CHECK(code_of([] { parse_model("cauchy(a=0,b=1)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0,b=1,c=2)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0,b=x)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0,a=1,b=1)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal a=0"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0,b=1,shift=1)"); }) == ErrorCode::kParse);
  CHECK(code_of([] { parse_model("normal(a=0,b=-1)"); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("key-value lists") {
  const KeyValueList kv = parse_key_values("sigma=[0.5, 1,2]; w=[0.25,0.5,0.25]; n=3");
  REQUIRE(kv.size() == 3);
  CHECK(kv[0].first == "sigma");
  CHECK(kv[0].second == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(kv[2].second == std::vector<double>{3.0});
  CHECK_THROWS_AS(parse_key_values("a=1; a=2"), Error);
  CHECK_THROWS_AS(parse_key_values("a=[1,2"), Error);
  CHECK_THROWS_AS(parse_key_values("a=[]"), Error);
  CHECK_THROWS_AS(parse_key_values("=1"), Error);
}

TEST_CASE("parameter grids are Cartesian, first key slowest") {
  const auto g = parse_param_grid(Family::kLogNormal, "mu=[-2,0,3]; tau=[0.25,1]");
  REQUIRE(g.size() == 6);
  CHECK(g[0] == ModelInstance::log_normal(-2.0, 0.25));
  CHECK(g[1] == ModelInstance::log_normal(-2.0, 1.0));
  CHECK(g[5] == ModelInstance::log_normal(3.0, 1.0));
  const auto h = parse_param_grid(Family::kHalfNormal, "sigma=[0.1,1,5,20]");
  REQUIRE(h.size() == 4);
  CHECK(h[3] == ModelInstance::half_normal(20.0));
  const auto s = parse_param_grid(Family::kExponential, "beta=[1,2]; shift=[0,1]");
  REQUIRE(s.size() == 4);
  CHECK(s[2] == ModelInstance::exponential(1.0, 1.0));
  CHECK_THROWS_AS(parse_param_grid(Family::kNormal, "a=[0,1]"), Error);
  CHECK_THROWS_AS(parse_param_grid(Family::kNormal, "a=[0]; b=[1]; c=[2]"), Error);
}
