#include "lskl/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lskl/error.hpp"

namespace lskl {

namespace {

double diameter(const std::vector<std::vector<double>>& simplex) {
  double d = 0.0;
  for (std::size_t i = 1; i < simplex.size(); ++i) {
    for (std::size_t k = 0; k < simplex[i].size(); ++k) d = std::max(d, std::fabs(simplex[i][k] - simplex[0][k]));
  }
  return d;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start, const NelderMeadOptions& opts) {
  const std::size_t dim = start.size();
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "nelder_mead: empty start point");
  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  NelderMeadResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
  for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += opts.initial_step;
  std::vector<double> values(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  std::vector<double> trial2(dim);

  for (;;) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<std::vector<double>> s2(dim + 1);
      std::vector<double> v2(dim + 1);
      for (std::size_t i = 0; i <= dim; ++i) {
        s2[i] = std::move(simplex[order[i]]);
        v2[i] = values[order[i]];
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }
    out.final_spread = values[dim] - values[0];
    out.final_size = diameter(simplex);
    if (std::isfinite(values[dim]) && out.final_spread <= opts.ftol && out.final_size <= opts.xtol) {
      out.converged = true;
      break;
    }
    if (out.evaluations >= opts.max_evaluations) break;
    ++out.iterations;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / static_cast<double>(dim);

    const auto& worst = simplex[dim];
    for (std::size_t k = 0; k < dim; ++k) trial[k] = centroid[k] + kReflect * (centroid[k] - worst[k]);
    const double fr = eval(trial);

    if (fr < values[0]) {
      for (std::size_t k = 0; k < dim; ++k) trial2[k] = centroid[k] + kExpand * (trial[k] - centroid[k]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[dim] = trial2;
        values[dim] = fe;
      } else {
        simplex[dim] = trial;
        values[dim] = fr;
      }
      continue;
    }
    if (fr < values[dim - 1]) {
      simplex[dim] = trial;
      values[dim] = fr;
      continue;
    }
    // Contraction, outside when the reflection improved on the worst point.
    const bool outside = fr < values[dim];
    for (std::size_t k = 0; k < dim; ++k) {
      trial2[k] = outside ? centroid[k] + kContract * (trial[k] - centroid[k])
                          : centroid[k] + kContract * (worst[k] - centroid[k]);
    }
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[dim])) {
      simplex[dim] = trial2;
      values[dim] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t k = 0; k < dim; ++k) simplex[i][k] = simplex[0][k] + kShrink * (simplex[i][k] - simplex[0][k]);
      values[i] = eval(simplex[i]);
    }
  }

  out.x = simplex[0];
  out.value = values[0];
  return out;
}

double brent_root(const std::function<double(double)>& g, double lo, double hi, double xtol, int max_iter) {
  double a = lo;
  double b = hi;
  double fa = g(a);
  double fb = g(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw Error(ErrorCode::kInvalidArgument, "brent_root: root not bracketed");
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) return b;
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      // Inverse quadratic interpolation, or secant when only two points are distinct.
      const double s = fb / fa;
      double p;
      double q;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = g(b);
  }
  throw Error(ErrorCode::kInvalidArgument, "brent_root: iteration limit reached");
}

}  // namespace lskl
