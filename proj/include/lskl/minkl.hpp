#pragma once

// Minimum-KL projection of a source model onto a target family:
//
//   min over theta2 of D_KL(f1 || f2(.; theta2))
//
// by the analytic registry, by simplex search over quadrature KL, or through
// the maximum-likelihood estimate of the target under simulated source data.
// For location-scale (and log-transformable) pairs the minimum does not
// depend on the source parameters; independence_check measures that.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lskl/distributions.hpp"
#include "lskl/divergence.hpp"

namespace lskl {

enum class MinKLMethod { kAnalytic, kNumeric, kMleAsymptotic };

std::string_view to_string(MinKLMethod method);

struct MinKLDiagnostics {
  int starts = 0;
  int starts_converged = 0;
  int starts_agreeing = 0;  // starts whose polished value is within agreement of the best
  int evaluations = 0;
  double final_spread = 0.0;
  double final_size = 0.0;
  bool converged = false;
  // False when no member of the target family covers the source support.
  bool feasible = true;
};

struct MinKLResult {
  ModelInstance argmin;
  KLValue value;
  MinKLMethod method = MinKLMethod::kNumeric;
  MinKLDiagnostics diagnostics;
};

struct MinKLOptions {
  int starts = 5;
  double ftol = 1e-10;
  double agreement = 1e-6;
  double search_tol = 1e-7;  // quadrature tolerance while searching
  double polish_tol = 1e-9;  // quadrature tolerance for the final polish
  int max_evaluations = 3000;
};

// Parameters of the target family that the optimizer actually moves.
// Location-like entries stay as is; scale-like entries are searched in log.
// Weibull and lognormal are searched in their (a, log b) image.
std::vector<double> to_search_coords(const ModelInstance& m);
ModelInstance from_search_coords(Family family, std::span<const double> coords, double shift);

// Shift given to scale-only and transformable targets: the source's lower
// support endpoint when finite, 0 otherwise.
double target_shift(const ModelInstance& source, Family target);

// Whether some member of `target` (with target_shift) covers the source support.
bool target_can_cover(const ModelInstance& source, Family target);

// Moment-matched starting member of the target family.
ModelInstance moment_matched_start(const ModelInstance& source, Family target);

// Analytic registry: half-normal -> exponential, lognormal -> Weibull,
// Weibull -> lognormal. Absent otherwise (exponential -> half-normal
// included, which is resolved numerically).
std::optional<MinKLResult> min_kl_analytic(const ModelInstance& f1, Family target);

// Multi-start Nelder-Mead over quadrature KL. Throws OptimizationFailure when
// no start converges. Infeasible targets return +inf with feasible = false.
MinKLResult min_kl_numeric(const ModelInstance& f1, Family target, const MinKLOptions& opts = {});

// Analytic when registered, numeric otherwise.
MinKLResult min_kl(const ModelInstance& f1, Family target, const MinKLOptions& opts = {});

// Target-family MLE from n >= 1000 draws of f1, then quadrature KL at it.
// Throws Error(kMleFailure) if a profile search does not converge.
MinKLResult min_kl_via_mle(const ModelInstance& f1, Family target, std::size_t n, std::uint64_t seed,
                           const MinKLOptions& opts = {});

// Maximum-likelihood fit of `family` to data, with the given shift for
// scale-only and transformable families.
ModelInstance fit_mle(Family family, std::span<const double> data, double shift = 0.0);

struct IndependenceReport {
  Family source;
  Family target;
  std::vector<ModelInstance> grid;
  std::vector<double> values;
  std::vector<MinKLMethod> methods;
  double spread = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // Grid has >= 4 settings, a 10x scale span and (for families with a free
  // location) a sign change in location.
  bool grid_coverage_ok = false;
};

struct IndependenceOptions {
  bool use_analytic = true;
  MinKLOptions minkl;
};

// Runs min-KL on every grid point (in parallel) and compares the spread of the
// minima with tol. Errors carry the offending grid point.
IndependenceReport independence_check(Family source, Family target, const std::vector<ModelInstance>& grid,
                                      double tol, const IndependenceOptions& opts = {});

bool grid_coverage_ok(const std::vector<ModelInstance>& grid);

}  // namespace lskl
