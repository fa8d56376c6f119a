#include "lskl/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "lskl/constants.hpp"
#include "lskl/error.hpp"

namespace lskl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// clang-format off
const std::array<FamilySpec, 8> kSpecs = {{
    {Family::kNormal, "normal", FamilyKind::kGenuineLocationScale, 2, {"a", "b"}, {false, true}, false,
     std::nullopt, 0.0, 1.0},
    {Family::kHalfNormal, "halfnormal", FamilyKind::kScaleOnly, 1, {"sigma", ""}, {true, false}, true,
     std::nullopt, 0.79788456080286535588, 1.0 - 2.0 / kPi},
    {Family::kExponential, "exponential", FamilyKind::kScaleOnly, 1, {"beta", ""}, {true, false}, true,
     std::nullopt, 1.0, 1.0},
    {Family::kGumbelMin, "gumbelmin", FamilyKind::kGenuineLocationScale, 2, {"a", "b"}, {false, true}, false,
     std::nullopt, -kEulerGamma, kPi * kPi / 6.0},
    {Family::kLogistic, "logistic", FamilyKind::kGenuineLocationScale, 2, {"a", "b"}, {false, true}, false,
     std::nullopt, 0.0, kPi * kPi / 3.0},
    {Family::kUniform, "uniform", FamilyKind::kGenuineLocationScale, 2, {"a", "b"}, {false, true}, false,
     std::nullopt, 0.5, 1.0 / 12.0},
    {Family::kLogNormal, "lognormal", FamilyKind::kTransformable, 2, {"mu", "tau"}, {false, true}, true,
     Family::kNormal, kNaN, kNaN},
    {Family::kWeibull, "weibull", FamilyKind::kTransformable, 2, {"lambda", "kappa"}, {true, true}, true,
     Family::kGumbelMin, kNaN, kNaN},
}};
// clang-format on

std::string normalize_name(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Standard normal log density and CDF.
double log_phi(double z) { return -0.5 * z * z - 0.5 * kLogTwoPi; }
double big_phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

bool Interval::lower_bounded() const { return std::isfinite(lower); }
bool Interval::upper_bounded() const { return std::isfinite(upper); }

const FamilySpec& family_spec(Family family) { return kSpecs.at(static_cast<std::size_t>(family)); }

std::string_view family_name(Family family) { return family_spec(family).name; }

std::optional<Family> family_from_name(std::string_view name) {
  const std::string key = normalize_name(name);
  for (const auto& spec : kSpecs) {
    if (key == spec.name) return spec.id;
  }
  if (key == "gaussian") return Family::kNormal;
  if (key == "exp") return Family::kExponential;
  if (key == "gumbel" || key == "extremevaluemin" || key == "gumbelminimum") return Family::kGumbelMin;
  if (key == "lnorm") return Family::kLogNormal;
  return std::nullopt;
}

double reduced_log_density(Family family, double z) {
  switch (family) {
    case Family::kNormal:
      return log_phi(z);
    case Family::kHalfNormal:
      return z < 0.0 ? -kInf : 0.5 * kLogTwoOverPi - 0.5 * z * z;
    case Family::kExponential:
      return z < 0.0 ? -kInf : -z;
    case Family::kGumbelMin:
      return z - std::exp(z);
    case Family::kLogistic: {
      const double az = std::fabs(z);
      return -az - 2.0 * std::log1p(std::exp(-az));
    }
    case Family::kUniform:
      return (z < 0.0 || z > 1.0) ? -kInf : 0.0;
    case Family::kLogNormal:
    case Family::kWeibull:
      break;
  }
  throw Error(ErrorCode::kInvalidArgument,
              std::string("no reduced density for transformable family ") + std::string(family_name(family)));
}

ModelInstance::ModelInstance(Family family, std::span<const double> params, double shift)
    : family_(family), shift_(shift) {
  const FamilySpec& s = family_spec(family);
  if (params.size() != s.n_params) {
    std::ostringstream os;
    os << s.name << " takes " << s.n_params << " parameter(s), got " << params.size();
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  for (std::size_t i = 0; i < s.n_params; ++i) {
    const double v = params[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(s.name) + ": parameter " + std::string(s.param_names[i]) + " must be finite");
    }
    if (s.positive[i] && !(v > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string(s.name) + ": parameter " + std::string(s.param_names[i]) + " must be > 0");
    }
    params_[i] = v;
  }
  if (!std::isfinite(shift)) throw Error(ErrorCode::kInvalidArgument, "shift must be finite");
  if (shift != 0.0 && !s.has_shift) {
    throw Error(ErrorCode::kInvalidArgument, std::string(s.name) + " does not take a shift");
  }
}

ModelInstance ModelInstance::normal(double a, double b) { return {Family::kNormal, std::array{a, b}}; }
ModelInstance ModelInstance::half_normal(double sigma, double shift) {
  return {Family::kHalfNormal, std::array{sigma}, shift};
}
ModelInstance ModelInstance::exponential(double beta, double shift) {
  return {Family::kExponential, std::array{beta}, shift};
}
ModelInstance ModelInstance::gumbel_min(double a, double b) { return {Family::kGumbelMin, std::array{a, b}}; }
ModelInstance ModelInstance::logistic(double a, double b) { return {Family::kLogistic, std::array{a, b}}; }
ModelInstance ModelInstance::uniform(double lower, double width) {
  return {Family::kUniform, std::array{lower, width}};
}
ModelInstance ModelInstance::log_normal(double mu, double tau, double shift) {
  return {Family::kLogNormal, std::array{mu, tau}, shift};
}
ModelInstance ModelInstance::weibull(double lambda, double kappa, double shift) {
  return {Family::kWeibull, std::array{lambda, kappa}, shift};
}

Interval ModelInstance::support() const {
  switch (family_) {
    case Family::kNormal:
    case Family::kGumbelMin:
    case Family::kLogistic:
      return {-kInf, kInf};
    case Family::kUniform:
      return {params_[0], params_[0] + params_[1]};
    case Family::kHalfNormal:
    case Family::kExponential:
    case Family::kLogNormal:
    case Family::kWeibull:
      return {shift_, kInf};
  }
  return {-kInf, kInf};
}

std::optional<TransformSpec> ModelInstance::transform() const {
  const auto target = spec().transform_target;
  if (!target) return std::nullopt;
  return TransformSpec{shift_, *target};
}

double log_density(const ModelInstance& m, double x) {
  if (std::isinf(x)) return -kInf;
  switch (m.family()) {
    case Family::kNormal:
    case Family::kGumbelMin:
    case Family::kLogistic:
    case Family::kUniform: {
      const double a = m.param(0);
      const double b = m.param(1);
      return reduced_log_density(m.family(), (x - a) / b) - std::log(b);
    }
    case Family::kHalfNormal:
    case Family::kExponential: {
      if (x < m.shift()) return -kInf;
      const double b = m.param(0);
      return reduced_log_density(m.family(), (x - m.shift()) / b) - std::log(b);
    }
    case Family::kLogNormal: {
      const double y = x - m.shift();
      if (!(y > 0.0)) return -kInf;
      const double ly = std::log(y);
      const double tau = m.param(1);
      const double d = ly - m.param(0);
      return -ly + 0.5 * (std::log(tau) - kLogTwoPi) - 0.5 * tau * d * d;
    }
    case Family::kWeibull: {
      const double y = x - m.shift();
      if (!(y > 0.0)) return -kInf;
      const double lambda = m.param(0);
      const double kappa = m.param(1);
      const double r = std::log(y) - std::log(lambda);
      return std::log(kappa) - std::log(lambda) + (kappa - 1.0) * r - std::exp(kappa * r);
    }
  }
  return -kInf;
}

double cdf(const ModelInstance& m, double x) {
  switch (m.family()) {
    case Family::kNormal:
      return big_phi((x - m.param(0)) / m.param(1));
    case Family::kGumbelMin:
      return -std::expm1(-std::exp((x - m.param(0)) / m.param(1)));
    case Family::kLogistic:
      return 1.0 / (1.0 + std::exp(-(x - m.param(0)) / m.param(1)));
    case Family::kUniform:
      return std::clamp((x - m.param(0)) / m.param(1), 0.0, 1.0);
    case Family::kHalfNormal: {
      const double z = (x - m.shift()) / m.param(0);
      return z <= 0.0 ? 0.0 : std::erf(z / std::numbers::sqrt2);
    }
    case Family::kExponential: {
      const double z = (x - m.shift()) / m.param(0);
      return z <= 0.0 ? 0.0 : -std::expm1(-z);
    }
    case Family::kLogNormal: {
      const double y = x - m.shift();
      if (!(y > 0.0)) return 0.0;
      return big_phi((std::log(y) - m.param(0)) * std::sqrt(m.param(1)));
    }
    case Family::kWeibull: {
      const double y = x - m.shift();
      if (!(y > 0.0)) return 0.0;
      return -std::expm1(-std::pow(y / m.param(0), m.param(1)));
    }
  }
  return kNaN;
}

double moment(const ModelInstance& m, Moment spec) {
  using K = Moment::Kind;
  const auto no_closed_form = [&]() -> double {
    throw Error(ErrorCode::kNoClosedForm, std::string("no closed-form moment for ") +
                                              std::string(family_name(m.family())) +
                                              "; integrate numerically (see expectation())");
  };
  if (m.shift() != 0.0) return no_closed_form();

  switch (m.family()) {
    case Family::kHalfNormal: {
      const double sigma = m.param(0);
      if (spec.kind == K::kMean) return sigma * std::sqrt(2.0 / kPi);
      if (spec.kind == K::kSecondRaw) return sigma * sigma;
      break;
    }
    case Family::kExponential: {
      const double beta = m.param(0);
      if (spec.kind == K::kMean) return beta;
      if (spec.kind == K::kSecondRaw) return 2.0 * beta * beta;
      break;
    }
    case Family::kLogNormal: {
      const double mu = m.param(0);
      const double tau = m.param(1);
      if (spec.kind == K::kLogMean) return mu;
      if (spec.kind == K::kPower) return std::exp(spec.p * spec.p / (2.0 * tau) + mu * spec.p);
      if (spec.kind == K::kLogVariance) return 1.0 / tau;
      break;
    }
    case Family::kWeibull: {
      const double lambda = m.param(0);
      const double kappa = m.param(1);
      if (spec.kind == K::kLogMean) return std::log(lambda) - kEulerGamma / kappa;
      if (spec.kind == K::kPower) return std::pow(lambda, spec.p) * std::tgamma(1.0 + spec.p / kappa);
      if (spec.kind == K::kLogVariance) return kPi * kPi / (6.0 * kappa * kappa);
      break;
    }
    default:
      break;
  }
  return no_closed_form();
}

ModelInstance to_location_scale(const ModelInstance& m) {
  switch (m.family()) {
    case Family::kWeibull:
      return ModelInstance::gumbel_min(std::log(m.param(0)), 1.0 / m.param(1));
    case Family::kLogNormal:
      return ModelInstance::normal(m.param(0), 1.0 / std::sqrt(m.param(1)));
    default:
      return m;
  }
}

DrawStream::DrawStream(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  engine_.seed(seq);
}

DrawStream::DrawStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x6c736b6cu};
  engine_.seed(seq);
}

double DrawStream::open_unit() {
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

double DrawStream::draw(const ModelInstance& m) {
  switch (m.family()) {
    case Family::kNormal:
      return m.param(0) + m.param(1) * standard_normal();
    case Family::kHalfNormal:
      return m.shift() + m.param(0) * std::fabs(standard_normal());
    case Family::kExponential:
      return m.shift() - m.param(0) * std::log(open_unit());
    case Family::kGumbelMin:
      return m.param(0) + m.param(1) * std::log(-std::log(open_unit()));
    case Family::kLogistic: {
      const double u = open_unit();
      return m.param(0) + m.param(1) * std::log(u / (1.0 - u));
    }
    case Family::kUniform:
      return m.param(0) + m.param(1) * open_unit();
    case Family::kLogNormal:
      return m.shift() + std::exp(m.param(0) + standard_normal() / std::sqrt(m.param(1)));
    case Family::kWeibull:
      return m.shift() + m.param(0) * std::pow(-std::log(open_unit()), 1.0 / m.param(1));
  }
  return kNaN;
}

Dataset sample(const ModelInstance& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample: n must be >= 1");
  DrawStream stream(seed);
  Dataset out;
  out.values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.values.push_back(stream.draw(m));
  out.seed = seed;
  out.provenance = "simulated";
  return out;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kNoClosedForm: return "no closed form";
    case ErrorCode::kIntegrationFailure: return "integration failure";
    case ErrorCode::kOptimizationFailure: return "optimization failure";
    case ErrorCode::kMleFailure: return "mle failure";
    case ErrorCode::kDataModelMismatch: return "data/model mismatch";
    case ErrorCode::kNoModelExplainsData: return "no model explains data";
    case ErrorCode::kIo: return "i/o failure";
  }
  return "error";
}

}  // namespace lskl
