#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "lskl/distributions.hpp"

namespace lskl {

enum class KLMethod { kClosedForm, kQuadrature, kMonteCarlo, kSample };

std::string_view to_string(KLMethod method);

struct KLValue {
  double value = 0.0;  // may be +inf
  KLMethod method = KLMethod::kClosedForm;
  std::optional<double> error_bound;
  std::optional<std::size_t> n_used;
  bool support_violation = false;

  bool finite() const;
};

inline constexpr double kDefaultQuadratureTol = 1e-8;
inline constexpr std::size_t kDefaultMonteCarloDraws = 1000000;

// Exact D_KL(f1 || f2) for the registered ordered family pairs:
//   half-normal -> exponential, exponential -> half-normal,
//   lognormal -> Weibull, Weibull -> lognormal,
//   and same-family normal, exponential, half-normal, lognormal.
// Both members must share the same shift. Absent otherwise.
std::optional<KLValue> kl_closed_form(const ModelInstance& f1, const ModelInstance& f2);

// Adaptive quadrature of f1 (log f1 - log f2) over the support of f1. Returns
// +inf (support_violation set) when f2 does not cover f1's support.
KLValue kl_quadrature(const ModelInstance& f1, const ModelInstance& f2, double tol = kDefaultQuadratureTol);

// Mean log density ratio over n >= 100 draws from f1; error_bound is the
// standard error.
KLValue kl_monte_carlo(const ModelInstance& f1, const ModelInstance& f2, std::size_t n = kDefaultMonteCarloDraws,
                       std::uint64_t seed = 1);

// Plug-in average of log f1(x_i) / f2(x_i). Not clamped at zero.
KLValue sample_kl(const Dataset& data, const ModelInstance& f1, const ModelInstance& f2);

// Closed form when registered, quadrature otherwise.
KLValue kl(const ModelInstance& f1, const ModelInstance& f2, double tol = kDefaultQuadratureTol);

}  // namespace lskl
