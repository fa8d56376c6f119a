#pragma once

// Location-scale families, their transformable relatives, and the handful of
// closed-form facts the divergence code leans on.
//
// A genuine member has density f(x; a, b) = h((x - a) / b) / b for a reduced
// density h. Scale-only members (half-normal, exponential) fix a at the lower
// support endpoint `shift` (0 unless translated). Lognormal and Weibull become
// genuine members (normal, Gumbel-min) under z = log(x - shift).

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lskl {

enum class Family { kNormal, kHalfNormal, kExponential, kGumbelMin, kLogistic, kUniform, kLogNormal, kWeibull };

enum class FamilyKind { kGenuineLocationScale, kLocationOnly, kScaleOnly, kTransformable };

inline constexpr std::array<Family, 8> kAllFamilies = {
    Family::kNormal,   Family::kHalfNormal, Family::kExponential, Family::kGumbelMin,
    Family::kLogistic, Family::kUniform,    Family::kLogNormal,   Family::kWeibull};

// Closed interval [lower, upper] with possibly infinite endpoints.
struct Interval {
  double lower;
  double upper;

  bool contains(double x) const { return x >= lower && x <= upper; }
  bool covers(const Interval& other) const { return other.lower >= lower && other.upper <= upper; }
  bool lower_bounded() const;
  bool upper_bounded() const;
};

struct FamilySpec {
  Family id;
  std::string_view name;
  FamilyKind kind;
  std::size_t n_params;
  std::array<std::string_view, 2> param_names;
  // Which native parameters must be strictly positive.
  std::array<bool, 2> positive;
  // Scale-only and transformable families accept a translation of the support.
  bool has_shift;
  // Genuine family reached through z = log(x - shift), if any.
  std::optional<Family> transform_target;
  // Mean and variance of the reduced density (genuine and scale-only only).
  double reduced_mean;
  double reduced_variance;
};

const FamilySpec& family_spec(Family family);
std::string_view family_name(Family family);
// Accepts canonical names plus a few spellings: "half-normal", "gumbel", "lognormal", ...
std::optional<Family> family_from_name(std::string_view name);

// log h(z); -inf outside the reduced support. Not defined for transformable families.
double reduced_log_density(Family family, double z);

// Forward map z = log(x - shift) and the native -> (a, b) parameter map.
struct TransformSpec {
  double shift = 0.0;
  Family target;
};

class ModelInstance {
 public:
  // Throws Error(kInvalidArgument) on wrong arity, non-finite values or
  // non-positive scale-like entries.
  ModelInstance(Family family, std::span<const double> params, double shift = 0.0);

  static ModelInstance normal(double a, double b);
  static ModelInstance half_normal(double sigma, double shift = 0.0);
  static ModelInstance exponential(double beta, double shift = 0.0);
  static ModelInstance gumbel_min(double a, double b);
  static ModelInstance logistic(double a, double b);
  static ModelInstance uniform(double lower, double width);
  static ModelInstance log_normal(double mu, double tau, double shift = 0.0);
  static ModelInstance weibull(double lambda, double kappa, double shift = 0.0);

  Family family() const { return family_; }
  const FamilySpec& spec() const { return family_spec(family_); }
  std::span<const double> params() const { return {params_.data(), spec().n_params}; }
  double param(std::size_t i) const { return params_.at(i); }
  double shift() const { return shift_; }
  Interval support() const;
  std::optional<TransformSpec> transform() const;

  bool operator==(const ModelInstance& other) const = default;

 private:
  Family family_;
  std::array<double, 2> params_{};
  double shift_ = 0.0;
};

struct Dataset {
  std::vector<double> values;
  std::optional<std::uint64_t> seed;
  std::string provenance;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
};

// log f(x); -inf exactly when x lies outside the support.
double log_density(const ModelInstance& m, double x);
double cdf(const ModelInstance& m, double x);

struct Moment {
  enum class Kind { kMean, kSecondRaw, kLogMean, kPower, kLogVariance };
  Kind kind;
  double p = 0.0;

  static Moment mean() { return {Kind::kMean}; }
  static Moment second_raw() { return {Kind::kSecondRaw}; }
  static Moment log_mean() { return {Kind::kLogMean}; }
  static Moment power(double p) { return {Kind::kPower, p}; }
  static Moment log_variance() { return {Kind::kLogVariance}; }
};

// Tabled closed-form moments. Anything else throws Error(kNoClosedForm).
double moment(const ModelInstance& m, Moment spec);

// Weibull -> Gumbel-min(log lambda, 1/kappa), lognormal -> normal(mu, 1/sqrt(tau)),
// genuine members unchanged.
ModelInstance to_location_scale(const ModelInstance& m);

// Independent draws from one model family with a caller-owned engine.
class DrawStream {
 public:
  explicit DrawStream(std::uint64_t seed);
  DrawStream(std::uint64_t seed, std::uint64_t stream);

  double draw(const ModelInstance& m);
  // Uniform on the open interval (0, 1).
  double open_unit();
  double standard_normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Dataset sample(const ModelInstance& m, std::size_t n, std::uint64_t seed);

}  // namespace lskl
