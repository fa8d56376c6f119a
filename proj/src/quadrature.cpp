#include "lskl/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "lskl/error.hpp"

namespace lskl {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::fabs(kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    kronrod += kWgk[j] * (f1[j] + f2[j]);
    abs_sum += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
  }
  // Deviation from the mean, used by the QUADPACK error heuristic.
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double value = kronrod * half;
  double err = std::fabs((kronrod - gauss) * half);
  const double resasc = asc * std::fabs(half);
  const double resabs = abs_sum * std::fabs(half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(err, 50.0 * kEps * resabs);
  return {a, b, value, err};
}

// Integrate over several finite segments sharing one tolerance.
QuadratureResult integrate_segments(const Integrand& f, const std::vector<std::pair<double, double>>& segments,
                                    const QuadratureOptions& opts) {
  constexpr int kInitialSplit = 8;
  std::priority_queue<Panel> heap;
  QuadratureResult out;
  double total = 0.0;
  double total_err = 0.0;

  for (const auto& [a, b] : segments) {
    const double h = (b - a) / kInitialSplit;
    for (int i = 0; i < kInitialSplit; ++i) {
      const double lo = a + h * i;
      const double hi = (i + 1 == kInitialSplit) ? b : a + h * (i + 1);
      Panel p = gauss_kronrod(f, lo, hi);
      out.evaluations += 15;
      if (!std::isfinite(p.value)) {
        out.value = p.value;
        out.error = std::numeric_limits<double>::infinity();
        out.nonfinite = true;
        return out;
      }
      total += p.value;
      total_err += p.error;
      heap.push(p);
    }
  }

  while (total_err > opts.abs_tol) {
    if (static_cast<int>(heap.size()) >= opts.max_intervals) {
      throw IntegrationFailure("adaptive quadrature exceeded the subdivision budget", total, total_err);
    }
    const Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Panel cannot be split further in double precision.
      throw IntegrationFailure("adaptive quadrature reached round-off limit", total, total_err);
    }
    heap.pop();
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    out.evaluations += 30;
    if (!std::isfinite(left.value) || !std::isfinite(right.value)) {
      out.value = std::isfinite(left.value) ? right.value : left.value;
      out.error = std::numeric_limits<double>::infinity();
      out.nonfinite = true;
      return out;
    }
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  double value = 0.0;
  double err = 0.0;
  out.intervals = static_cast<int>(heap.size());
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = err;
  return out;
}

// Point and spread used to map an unbounded support.
struct Anchor {
  double center;
  double spread;
};

Anchor anchor_for(const ModelInstance& m) {
  switch (m.family()) {
    case Family::kNormal:
    case Family::kGumbelMin:
    case Family::kLogistic:
    case Family::kUniform:
      return {m.param(0), m.param(1)};
    case Family::kHalfNormal:
    case Family::kExponential:
      return {m.shift(), m.param(0)};
    case Family::kLogNormal:
    case Family::kWeibull: {
      const ModelInstance ls = to_location_scale(m);
      return {ls.param(0), ls.param(1)};
    }
  }
  return {0.0, 1.0};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts) {
  if (!(opts.abs_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "quadrature tolerance must be > 0");
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::kInvalidArgument, "integrate() needs finite limits");
  }
  if (a == b) return {};
  if (a > b) {
    QuadratureResult r = integrate_segments(f, {{b, a}}, opts);
    r.value = -r.value;
    return r;
  }
  return integrate_segments(f, {{a, b}}, opts);
}

QuadratureResult integrate_over_support(const ModelInstance& m, const Integrand& g,
                                        const QuadratureOptions& opts) {
  if (!(opts.abs_tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "quadrature tolerance must be > 0");
  const Interval support = m.support();
  const Anchor anchor = anchor_for(m);

  if (support.lower_bounded() && support.upper_bounded()) {
    return integrate_segments(g, {{support.lower, support.upper}}, opts);
  }

  if (m.transform()) {
    // x = shift + exp(u); both half-lines of u mapped onto [0, 1).
    const double shift = m.shift();
    const double c = anchor.center;
    const double w = anchor.spread;
    const Integrand mapped = [&](double t) {
      if (t <= -1.0 || t >= 1.0) return 0.0;
      const double s = std::fabs(t);
      const double du = w * s / (1.0 - s);
      const double u = t >= 0.0 ? c + du : c - du;
      const double ex = std::exp(u);
      const double x = shift + ex;
      if (!(x > shift) || !std::isfinite(x)) return 0.0;
      const double jac = w / ((1.0 - s) * (1.0 - s)) * ex;
      const double v = g(x);
      return v == 0.0 ? 0.0 : v * jac;
    };
    return integrate_segments(mapped, {{-1.0, 0.0}, {0.0, 1.0}}, opts);
  }

  if (support.lower_bounded()) {
    const double lo = support.lower;
    const double s = anchor.spread;
    const Integrand mapped = [&](double t) {
      if (t >= 1.0) return 0.0;
      const double x = lo + s * t / (1.0 - t);
      const double v = g(x);
      return v == 0.0 ? 0.0 : v * s / ((1.0 - t) * (1.0 - t));
    };
    return integrate_segments(mapped, {{0.0, 1.0}}, opts);
  }

  // Whole real line, split at the location.
  const double c = anchor.center;
  const double s = anchor.spread;
  const Integrand mapped = [&](double t) {
    const double a = std::fabs(t);
    if (a >= 1.0) return 0.0;
    const double dx = s * a / (1.0 - a);
    const double x = t >= 0.0 ? c + dx : c - dx;
    const double v = g(x);
    return v == 0.0 ? 0.0 : v * s / ((1.0 - a) * (1.0 - a));
  };
  return integrate_segments(mapped, {{-1.0, 0.0}, {0.0, 1.0}}, opts);
}

double expectation(const ModelInstance& m, const std::function<double(double)>& g, double abs_tol) {
  const Integrand integrand = [&](double x) {
    const double lf = log_density(m, x);
    if (lf == -std::numeric_limits<double>::infinity()) return 0.0;
    const double f = std::exp(lf);
    return f == 0.0 ? 0.0 : f * g(x);
  };
  QuadratureOptions opts;
  opts.abs_tol = abs_tol;
  return integrate_over_support(m, integrand, opts).value;
}

}  // namespace lskl
