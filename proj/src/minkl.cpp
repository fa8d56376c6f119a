#include "lskl/minkl.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "lskl/constants.hpp"
#include "lskl/error.hpp"
#include "lskl/optimize.hpp"
#include "lskl/quadrature.hpp"
#include "lskl/text_form.hpp"

namespace lskl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TwoMoments {
  double mean;
  double variance;
};

TwoMoments raw_moments(const ModelInstance& m) {
  const double s = m.shift();
  switch (m.family()) {
    case Family::kNormal:
      return {m.param(0), m.param(1) * m.param(1)};
    case Family::kHalfNormal: {
      const double sigma = m.param(0);
      return {s + sigma * std::sqrt(2.0 / kPi), sigma * sigma * (1.0 - 2.0 / kPi)};
    }
    case Family::kExponential:
      return {s + m.param(0), m.param(0) * m.param(0)};
    case Family::kGumbelMin:
    case Family::kLogistic:
    case Family::kUniform: {
      const FamilySpec& spec = m.spec();
      const double b = m.param(1);
      return {m.param(0) + b * spec.reduced_mean, b * b * spec.reduced_variance};
    }
    case Family::kLogNormal: {
      const double mu = m.param(0);
      const double v = 1.0 / m.param(1);
      return {s + std::exp(mu + 0.5 * v), std::expm1(v) * std::exp(2.0 * mu + v)};
    }
    case Family::kWeibull: {
      const double lambda = m.param(0);
      const double kappa = m.param(1);
      const double g1 = std::tgamma(1.0 + 1.0 / kappa);
      const double g2 = std::tgamma(1.0 + 2.0 / kappa);
      return {s + lambda * g1, lambda * lambda * (g2 - g1 * g1)};
    }
  }
  return {0.0, 1.0};
}

// Mean and variance of log(X - s), closed form where the support starts at s.
TwoMoments log_moments(const ModelInstance& m, double s) {
  if (m.support().lower == s) {
    switch (m.family()) {
      case Family::kLogNormal:
        return {m.param(0), 1.0 / m.param(1)};
      case Family::kWeibull:
        return {std::log(m.param(0)) - kEulerGamma / m.param(1), kPi * kPi / (6.0 * m.param(1) * m.param(1))};
      case Family::kHalfNormal:
        return {std::log(m.param(0)) - 0.5 * (kEulerGamma + std::numbers::ln2), kPi * kPi / 8.0};
      case Family::kExponential:
        return {std::log(m.param(0)) - kEulerGamma, kPi * kPi / 6.0};
      case Family::kUniform:
        return {std::log(m.param(1)) - 1.0, 1.0};
      default:
        break;
    }
  }
  const double e1 = expectation(m, [s](double x) { return std::log(x - s); }, 1e-7);
  const double e2 = expectation(
      m,
      [s, e1](double x) {
        const double d = std::log(x - s) - e1;
        return d * d;
      },
      1e-7);
  return {e1, e2};
}

double last_coord(const std::vector<double>& x) { return x.back(); }

struct StartOutcome {
  std::vector<double> x;
  double value = kInf;
  bool converged = false;
  int evaluations = 0;
  double spread = 0.0;
  double size = 0.0;
};

MinKLResult infeasible_result(const ModelInstance& f1, Family target) {
  MinKLResult r{moment_matched_start(f1, target), {}, MinKLMethod::kNumeric, {}};
  r.value.value = kInf;
  r.value.method = KLMethod::kQuadrature;
  r.value.error_bound = 0.0;
  r.value.support_violation = true;
  r.diagnostics.feasible = false;
  return r;
}

// Solves the Gumbel-min scale score equation
//   b = sum(y w) / sum(w) - mean(y),  w = exp(y / b)
// and returns (a, b).
std::pair<double, double> gumbel_min_mle(std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  const double ymax = *std::max_element(y.begin(), y.end());
  const double ymin = *std::min_element(y.begin(), y.end());
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  if (!(ymax > ymin)) throw Error(ErrorCode::kMleFailure, "gumbel-min mle: degenerate data");

  const auto score = [&](double b) {
    double sw = 0.0;
    double swy = 0.0;
    for (double v : y) {
      const double w = std::exp((v - ymax) / b);
      sw += w;
      swy += w * (v - ymax);
    }
    return b - (swy / sw + ymax - ybar);
  };
  double sd = 0.0;
  for (double v : y) sd += (v - ybar) * (v - ybar);
  sd = std::sqrt(sd / n);
  double lo = 1e-6 * sd;
  double hi = sd;
  int expand = 0;
  while (score(hi) <= 0.0) {
    hi *= 2.0;
    if (++expand > 60) throw Error(ErrorCode::kMleFailure, "gumbel-min mle: cannot bracket the scale");
  }
  if (score(lo) >= 0.0) throw Error(ErrorCode::kMleFailure, "gumbel-min mle: cannot bracket the scale");
  double b;
  try {
    b = brent_root(score, lo, hi, 1e-13 * sd);
  } catch (const Error&) {
    throw Error(ErrorCode::kMleFailure, "gumbel-min mle: profile search did not converge");
  }
  double sw = 0.0;
  for (double v : y) sw += std::exp((v - ymax) / b);
  const double a = ymax + b * std::log(sw / n);
  return {a, b};
}

}  // namespace

std::string_view to_string(MinKLMethod method) {
  switch (method) {
    case MinKLMethod::kAnalytic: return "analytic";
    case MinKLMethod::kNumeric: return "numeric";
    case MinKLMethod::kMleAsymptotic: return "mle_asymptotic";
  }
  return "unknown";
}

std::vector<double> to_search_coords(const ModelInstance& m) {
  switch (m.family()) {
    case Family::kHalfNormal:
    case Family::kExponential:
      return {std::log(m.param(0))};
    case Family::kLogNormal:
      return {m.param(0), -0.5 * std::log(m.param(1))};
    case Family::kWeibull:
      return {std::log(m.param(0)), -std::log(m.param(1))};
    default:
      return {m.param(0), std::log(m.param(1))};
  }
}

ModelInstance from_search_coords(Family family, std::span<const double> c, double shift) {
  switch (family) {
    case Family::kHalfNormal:
    case Family::kExponential:
      return ModelInstance(family, std::array{std::exp(c[0])}, shift);
    case Family::kLogNormal:
      return ModelInstance::log_normal(c[0], std::exp(-2.0 * c[1]), shift);
    case Family::kWeibull:
      return ModelInstance::weibull(std::exp(c[0]), std::exp(-c[1]), shift);
    default:
      return ModelInstance(family, std::array{c[0], std::exp(c[1])});
  }
}

double target_shift(const ModelInstance& source, Family target) {
  if (!family_spec(target).has_shift) return 0.0;
  const double lo = source.support().lower;
  return std::isfinite(lo) ? lo : 0.0;
}

bool target_can_cover(const ModelInstance& source, Family target) {
  const Interval s = source.support();
  switch (target) {
    case Family::kNormal:
    case Family::kGumbelMin:
    case Family::kLogistic:
      return true;
    case Family::kUniform:
      return s.lower_bounded() && s.upper_bounded();
    default:
      return s.lower_bounded();
  }
}

ModelInstance moment_matched_start(const ModelInstance& source, Family target) {
  const double s = target_shift(source, target);
  const FamilySpec& spec = family_spec(target);
  const bool coverable = target_can_cover(source, target);
  const auto positive_or = [](double v, double fallback) { return (std::isfinite(v) && v > 0.0) ? v : fallback; };

  switch (target) {
    case Family::kHalfNormal:
    case Family::kExponential: {
      if (!coverable) return ModelInstance(target, std::array{1.0});
      const TwoMoments mm = raw_moments(source);
      const double d = mm.mean - s;
      const double p = target == Family::kExponential ? d : std::sqrt(mm.variance + d * d);
      return ModelInstance(target, std::array{positive_or(p, 1.0)}, s);
    }
    case Family::kLogNormal:
    case Family::kWeibull: {
      if (!coverable) return ModelInstance(target, std::array{1.0, 1.0});
      const TwoMoments lm = log_moments(source, s);
      if (target == Family::kLogNormal) {
        return ModelInstance::log_normal(lm.mean, positive_or(1.0 / lm.variance, 1.0), s);
      }
      const double b = positive_or(std::sqrt(lm.variance / (kPi * kPi / 6.0)), 1.0);
      return ModelInstance::weibull(std::exp(lm.mean + kEulerGamma * b), 1.0 / b, s);
    }
    case Family::kUniform: {
      const Interval sup = source.support();
      if (coverable) return ModelInstance::uniform(sup.lower, sup.upper - sup.lower);
      [[fallthrough]];
    }
    default: {
      const TwoMoments mm = raw_moments(source);
      const double b = positive_or(std::sqrt(mm.variance / spec.reduced_variance), 1.0);
      return ModelInstance(target, std::array{mm.mean - b * spec.reduced_mean, b});
    }
  }
}

std::optional<MinKLResult> min_kl_analytic(const ModelInstance& f1, Family target) {
  const double s = f1.shift();
  const auto make = [&](ModelInstance argmin, double value) {
    MinKLResult r{std::move(argmin), {value, KLMethod::kClosedForm, 0.0, std::nullopt, false},
                  MinKLMethod::kAnalytic, {}};
    r.diagnostics.converged = true;
    return r;
  };
  if (f1.family() == Family::kHalfNormal && target == Family::kExponential) {
    return make(ModelInstance::exponential(f1.param(0) * std::sqrt(2.0 / kPi), s), kLogTwoOverPi + 0.5);
  }
  if (f1.family() == Family::kLogNormal && target == Family::kWeibull) {
    const double mu = f1.param(0);
    const double root_tau = std::sqrt(f1.param(1));
    return make(ModelInstance::weibull(std::exp(0.5 / root_tau + mu), root_tau, s), 1.0 - 0.5 * kLogTwoPi);
  }
  if (f1.family() == Family::kWeibull && target == Family::kLogNormal) {
    const double kappa = f1.param(1);
    const double mu = std::log(f1.param(0)) - kEulerGamma / kappa;
    const double tau = 6.0 * kappa * kappa / (kPi * kPi);
    return make(ModelInstance::log_normal(mu, tau, s),
                0.5 * kLogTwoPi + std::log(kPi) - kEulerGamma - 0.5 * std::log(6.0) - 0.5);
  }
  return std::nullopt;
}

MinKLResult min_kl_numeric(const ModelInstance& f1, Family target, const MinKLOptions& opts) {
  if (!target_can_cover(f1, target)) return infeasible_result(f1, target);
  if (opts.starts < 1) throw Error(ErrorCode::kInvalidArgument, "min_kl_numeric: need at least one start");

  const double shift = target_shift(f1, target);
  const ModelInstance init = moment_matched_start(f1, target);
  const std::vector<double> x0 = to_search_coords(init);
  const std::size_t dim = x0.size();
  const double init_scale = std::exp(x0.back());

  std::vector<std::vector<double>> starts{x0};
  const std::vector<std::vector<double>> offsets =
      dim == 1 ? std::vector<std::vector<double>>{{0.5}, {-0.5}, {1.0}, {-1.0}, {1.5}, {-1.5}}
               : std::vector<std::vector<double>>{{0.5 * init_scale, 0.0}, {-0.5 * init_scale, 0.0},
                                                  {0.0, 0.5},            {0.0, -0.5},
                                                  {init_scale, 0.7},     {-init_scale, -0.7}};
  for (std::size_t i = 0; static_cast<int>(starts.size()) < opts.starts; ++i) {
    std::vector<double> x = x0;
    const auto& off = offsets[i % offsets.size()];
    const double mult = 1.0 + static_cast<double>(i / offsets.size());
    for (std::size_t k = 0; k < dim; ++k) x[k] += mult * off[k];
    starts.push_back(std::move(x));
  }

  const auto objective = [&](double tol) {
    return [&, tol](std::span<const double> c) {
      const ModelInstance m = from_search_coords(target, c, shift);
      try {
        return kl_quadrature(f1, m, tol).value;
      } catch (const IntegrationFailure& e) {
        return e.partial_estimate();
      } catch (const Error&) {
        return kInf;
      }
    };
  };
  const Objective search = objective(opts.search_tol);
  const Objective polish = objective(opts.polish_tol);

  std::vector<StartOutcome> outcomes(starts.size());
  std::vector<std::exception_ptr> errors(starts.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      NelderMeadOptions so;
      so.ftol = 1e-9;
      so.xtol = 1e-6;
      so.max_evaluations = opts.max_evaluations;
      so.initial_step = 0.25;
      const NelderMeadResult coarse = nelder_mead(search, starts[i], so);
      NelderMeadOptions po;
      po.ftol = opts.ftol;
      po.xtol = 1e-7;
      po.max_evaluations = opts.max_evaluations;
      po.initial_step = 0.02;
      const NelderMeadResult fine = nelder_mead(polish, coarse.x, po);
      outcomes[i] = {fine.x, fine.value, fine.converged && std::isfinite(fine.value),
                     coarse.evaluations + fine.evaluations, fine.final_spread, fine.final_size};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    const double d = outcomes[i].value - outcomes[best].value;
    if (d < -1e-12 || (std::fabs(d) <= 1e-12 && last_coord(outcomes[i].x) < last_coord(outcomes[best].x))) {
      best = i;
    }
  }

  MinKLDiagnostics diag;
  diag.starts = static_cast<int>(outcomes.size());
  for (const auto& o : outcomes) {
    diag.evaluations += o.evaluations;
    if (o.converged) ++diag.starts_converged;
    if (o.converged && std::fabs(o.value - outcomes[best].value) <= opts.agreement) ++diag.starts_agreeing;
  }
  const StartOutcome& b = outcomes[best];
  if (diag.starts_converged == 0) {
    throw OptimizationFailure("min_kl_numeric: no start converged for " + to_text(f1) + " -> " +
                                  std::string(family_name(target)),
                              b.x, b.value);
  }
  diag.final_spread = b.spread;
  diag.final_size = b.size;
  diag.converged = b.converged && b.spread < opts.ftol && diag.starts_agreeing >= 2;

  MinKLResult r{from_search_coords(target, b.x, shift), {}, MinKLMethod::kNumeric, diag};
  r.value = kl_quadrature(f1, r.argmin, opts.polish_tol);
  return r;
}

MinKLResult min_kl(const ModelInstance& f1, Family target, const MinKLOptions& opts) {
  if (auto a = min_kl_analytic(f1, target)) return *a;
  return min_kl_numeric(f1, target, opts);
}

ModelInstance fit_mle(Family family, std::span<const double> data, double shift) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "fit_mle: empty dataset");
  const double n = static_cast<double>(data.size());
  const auto mean_of = [&](auto&& fn) {
    double s = 0.0;
    for (double x : data) s += fn(x);
    return s / n;
  };
  const auto shifted_log = [&]() {
    std::vector<double> y;
    y.reserve(data.size());
    for (double x : data) {
      if (!(x > shift)) throw Error(ErrorCode::kDataModelMismatch, "fit_mle: datum at or below the shift");
      y.push_back(std::log(x - shift));
    }
    return y;
  };

  switch (family) {
    case Family::kExponential: {
      const double beta = mean_of([&](double x) { return x - shift; });
      if (!(beta > 0.0)) throw Error(ErrorCode::kMleFailure, "exponential mle: non-positive mean");
      return ModelInstance::exponential(beta, shift);
    }
    case Family::kHalfNormal: {
      const double s2 = mean_of([&](double x) { return (x - shift) * (x - shift); });
      if (!(s2 > 0.0)) throw Error(ErrorCode::kMleFailure, "half-normal mle: zero second moment");
      return ModelInstance::half_normal(std::sqrt(s2), shift);
    }
    case Family::kNormal: {
      const double m = mean_of([](double x) { return x; });
      const double v = mean_of([&](double x) { return (x - m) * (x - m); });
      if (!(v > 0.0)) throw Error(ErrorCode::kMleFailure, "normal mle: zero variance");
      return ModelInstance::normal(m, std::sqrt(v));
    }
    case Family::kLogNormal: {
      const std::vector<double> y = shifted_log();
      const double m = std::accumulate(y.begin(), y.end(), 0.0) / n;
      double v = 0.0;
      for (double t : y) v += (t - m) * (t - m);
      v /= n;
      if (!(v > 0.0)) throw Error(ErrorCode::kMleFailure, "lognormal mle: zero log variance");
      return ModelInstance::log_normal(m, 1.0 / v, shift);
    }
    case Family::kGumbelMin: {
      const auto [a, b] = gumbel_min_mle(data);
      return ModelInstance::gumbel_min(a, b);
    }
    case Family::kWeibull: {
      const std::vector<double> y = shifted_log();
      const auto [a, b] = gumbel_min_mle(y);
      return ModelInstance::weibull(std::exp(a), 1.0 / b, shift);
    }
    case Family::kUniform: {
      const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
      if (!(*hi > *lo)) throw Error(ErrorCode::kMleFailure, "uniform mle: degenerate data");
      return ModelInstance::uniform(*lo, *hi - *lo);
    }
    case Family::kLogistic: {
      const double m = mean_of([](double x) { return x; });
      const double v = mean_of([&](double x) { return (x - m) * (x - m); });
      if (!(v > 0.0)) throw Error(ErrorCode::kMleFailure, "logistic mle: zero variance");
      const std::vector<double> x0{m, std::log(std::sqrt(3.0 * v) / kPi)};
      const Objective nll = [&](std::span<const double> c) {
        const ModelInstance mi = ModelInstance::logistic(c[0], std::exp(c[1]));
        double s = 0.0;
        for (double x : data) s -= log_density(mi, x);
        return s / n;
      };
      NelderMeadOptions o;
      o.ftol = 1e-13;
      o.xtol = 1e-9;
      o.initial_step = 0.1;
      const NelderMeadResult r = nelder_mead(nll, x0, o);
      if (!r.converged) throw Error(ErrorCode::kMleFailure, "logistic mle: simplex search did not converge");
      return ModelInstance::logistic(r.x[0], std::exp(r.x[1]));
    }
  }
  throw Error(ErrorCode::kMleFailure, "fit_mle: unsupported family");
}

MinKLResult min_kl_via_mle(const ModelInstance& f1, Family target, std::size_t n, std::uint64_t seed,
                           const MinKLOptions& opts) {
  if (n < 1000) throw Error(ErrorCode::kInvalidArgument, "min_kl_via_mle: n must be >= 1000");
  if (!target_can_cover(f1, target)) {
    MinKLResult r = infeasible_result(f1, target);
    r.method = MinKLMethod::kMleAsymptotic;
    return r;
  }
  const Dataset data = sample(f1, n, seed);
  const ModelInstance theta_hat = fit_mle(target, data.values, target_shift(f1, target));
  MinKLResult r{theta_hat, kl_quadrature(f1, theta_hat, opts.polish_tol), MinKLMethod::kMleAsymptotic, {}};
  r.value.n_used = n;
  r.diagnostics.converged = true;
  return r;
}

bool grid_coverage_ok(const std::vector<ModelInstance>& grid) {
  if (grid.size() < 4) return false;
  const FamilySpec& spec = grid.front().spec();
  bool scale_span = false;
  bool sign_change = true;
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& m : grid) {
      lo = std::min(lo, m.param(i));
      hi = std::max(hi, m.param(i));
    }
    if (spec.positive[i]) {
      if (hi / lo >= 10.0) scale_span = true;
    } else if (!(lo < 0.0 && hi >= 0.0) && !(lo <= 0.0 && hi > 0.0)) {
      sign_change = false;
    }
  }
  return scale_span && sign_change;
}

IndependenceReport independence_check(Family source, Family target, const std::vector<ModelInstance>& grid,
                                      double tol, const IndependenceOptions& opts) {
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, "independence_check: empty grid");
  for (const auto& m : grid) {
    if (m.family() != source) {
      throw Error(ErrorCode::kInvalidArgument, "independence_check: grid point " + to_text(m) +
                                                   " is not a " + std::string(family_name(source)));
    }
  }
  IndependenceReport rep{source, target, grid, std::vector<double>(grid.size()),
                         std::vector<MinKLMethod>(grid.size()), 0.0, tol, false, grid_coverage_ok(grid)};
  std::vector<std::exception_ptr> errors(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      const MinKLResult r = opts.use_analytic ? min_kl(grid[i], target, opts.minkl)
                                              : min_kl_numeric(grid[i], target, opts.minkl);
      rep.values[i] = r.value.value;
      rep.methods[i] = r.method;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const OptimizationFailure& e) {
      throw OptimizationFailure("grid point " + std::to_string(i) + " (" + to_text(grid[i]) + "): " + e.what(),
                                e.best_so_far(), e.best_value());
    } catch (const Error& e) {
      throw Error(e.code(), "grid point " + std::to_string(i) + " (" + to_text(grid[i]) + "): " + e.what());
    }
  }
  const auto [lo, hi] = std::minmax_element(rep.values.begin(), rep.values.end());
  rep.spread = (std::isfinite(*lo) && std::isfinite(*hi)) ? *hi - *lo : (*lo == *hi ? 0.0 : kInf);
  rep.pass = rep.spread <= tol;
  return rep;
}

}  // namespace lskl
