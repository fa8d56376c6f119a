#include "lskl/divergence.hpp"

#include <cmath>
#include <limits>

#include "lskl/constants.hpp"
#include "lskl/error.hpp"
#include "lskl/kernels.hpp"
#include "lskl/quadrature.hpp"

namespace lskl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

KLValue exact(double v) { return {v, KLMethod::kClosedForm, 0.0, std::nullopt, false}; }

// Gaussian KL for (mean, sd) pairs; reused for lognormal via log-space params.
double gaussian_kl(double m1, double s1, double m2, double s2) {
  const double d = m1 - m2;
  return std::log(s2 / s1) + (s1 * s1 + d * d) / (2.0 * s2 * s2) - 0.5;
}

}  // namespace

std::string_view to_string(KLMethod method) {
  switch (method) {
    case KLMethod::kClosedForm: return "closed_form";
    case KLMethod::kQuadrature: return "quadrature";
    case KLMethod::kMonteCarlo: return "monte_carlo";
    case KLMethod::kSample: return "sample";
  }
  return "unknown";
}

bool KLValue::finite() const { return std::isfinite(value); }

std::optional<KLValue> kl_closed_form(const ModelInstance& f1, const ModelInstance& f2) {
  if (f1.shift() != f2.shift()) return std::nullopt;
  const Family a = f1.family();
  const Family b = f2.family();

  if (a == Family::kHalfNormal && b == Family::kExponential) {
    // -log sigma + 1/2 log(2/pi) - E(x^2)/(2 sigma^2) + log beta + E(x)/beta
    const double sigma = f1.param(0);
    const double beta = f2.param(0);
    return exact(-std::log(sigma) + 0.5 * kLogTwoOverPi - 0.5 + std::log(beta) +
                 sigma * std::sqrt(2.0 / kPi) / beta);
  }
  if (a == Family::kExponential && b == Family::kHalfNormal) {
    // -log beta - E(x)/beta + log sigma - 1/2 log(2/pi) + E(x^2)/(2 sigma^2)
    const double beta = f1.param(0);
    const double sigma = f2.param(0);
    return exact(-std::log(beta) - 1.0 + std::log(sigma) - 0.5 * kLogTwoOverPi + beta * beta / (sigma * sigma));
  }
  if (a == Family::kLogNormal && b == Family::kWeibull) {
    const double mu = f1.param(0);
    const double tau = f1.param(1);
    const double log_lambda = std::log(f2.param(0));
    const double kappa = f2.param(1);
    // E[(x/lambda)^kappa] = exp{kappa^2/(2 tau) + kappa (mu - log lambda)}
    const double e_pow = std::exp(kappa * kappa / (2.0 * tau) + kappa * (mu - log_lambda));
    const double e_log_f1 = -mu + 0.5 * (std::log(tau) - kLogTwoPi) - 0.5;
    const double e_log_f2 = std::log(kappa) - log_lambda + (kappa - 1.0) * (mu - log_lambda) - e_pow;
    return exact(e_log_f1 - e_log_f2);
  }
  if (a == Family::kWeibull && b == Family::kLogNormal) {
    const double log_lambda = std::log(f1.param(0));
    const double kappa = f1.param(1);
    const double mu = f2.param(0);
    const double tau = f2.param(1);
    const double e_log = log_lambda - kEulerGamma / kappa;
    const double var_log = kPi * kPi / (6.0 * kappa * kappa);
    const double d = e_log - mu;
    // E[log x] terms cancel the (kappa - 1) gamma / kappa piece of E log f1.
    const double e_log_f1 = std::log(kappa) - log_lambda - (kappa - 1.0) * kEulerGamma / kappa - 1.0;
    const double e_log_f2 = -e_log + 0.5 * (std::log(tau) - kLogTwoPi) - 0.5 * tau * (var_log + d * d);
    return exact(e_log_f1 - e_log_f2);
  }
  if (a != b) return std::nullopt;

  switch (a) {
    case Family::kNormal:
      return exact(gaussian_kl(f1.param(0), f1.param(1), f2.param(0), f2.param(1)));
    case Family::kExponential: {
      const double r = f1.param(0) / f2.param(0);
      return exact(r - std::log(r) - 1.0);
    }
    case Family::kHalfNormal: {
      const double r = f1.param(0) / f2.param(0);
      return exact(0.5 * r * r - std::log(r) - 0.5);
    }
    case Family::kLogNormal:
      return exact(gaussian_kl(f1.param(0), 1.0 / std::sqrt(f1.param(1)), f2.param(0),
                               1.0 / std::sqrt(f2.param(1))));
    default:
      return std::nullopt;
  }
}

KLValue kl_quadrature(const ModelInstance& f1, const ModelInstance& f2, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kl_quadrature: tol must be > 0");
  KLValue out;
  out.method = KLMethod::kQuadrature;
  if (!f2.support().covers(f1.support())) {
    out.value = kInf;
    out.error_bound = 0.0;
    out.support_violation = true;
    return out;
  }
  const Integrand integrand = [&](double x) {
    const double lf1 = log_density(f1, x);
    if (lf1 == -kInf) return 0.0;
    const double p = std::exp(lf1);
    if (p == 0.0) return 0.0;
    const double lf2 = log_density(f2, x);
    if (lf2 == -kInf) return kInf;
    return p * (lf1 - lf2);
  };
  QuadratureOptions opts;
  opts.abs_tol = tol;
  const QuadratureResult r = integrate_over_support(f1, integrand, opts);
  if (r.nonfinite) {
    out.value = kInf;
    out.error_bound = 0.0;
    return out;
  }
  out.value = r.value;
  out.error_bound = r.error;
  return out;
}

KLValue kl_monte_carlo(const ModelInstance& f1, const ModelInstance& f2, std::size_t n, std::uint64_t seed) {
  if (n < 100) throw Error(ErrorCode::kInvalidArgument, "kl_monte_carlo: n must be >= 100");
  const LogRatioStats s = kernels::log_ratio_draws_parallel(f1, f2, n, seed);
  KLValue out;
  out.method = KLMethod::kMonteCarlo;
  out.n_used = n;
  if (s.outside_f2) {
    out.value = kInf;
    out.error_bound = 0.0;
    out.support_violation = true;
    return out;
  }
  out.value = s.stats.mean;
  out.error_bound = s.stats.standard_error();
  return out;
}

KLValue sample_kl(const Dataset& data, const ModelInstance& f1, const ModelInstance& f2) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "sample_kl: empty dataset");
  const LogRatioStats s = kernels::log_ratio_data_parallel(data.values, f1, f2);
  if (s.outside_f1) {
    throw Error(ErrorCode::kDataModelMismatch, "sample_kl: a datum lies outside the support of f1");
  }
  KLValue out;
  out.method = KLMethod::kSample;
  out.n_used = data.size();
  if (s.outside_f2) {
    out.value = kInf;
    out.error_bound = 0.0;
    out.support_violation = true;
    return out;
  }
  out.value = s.stats.mean;
  out.error_bound = s.stats.standard_error();
  return out;
}

KLValue kl(const ModelInstance& f1, const ModelInstance& f2, double tol) {
  if (auto cf = kl_closed_form(f1, f2)) return *cf;
  return kl_quadrature(f1, f2, tol);
}

}  // namespace lskl
