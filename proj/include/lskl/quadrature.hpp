#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration, plus helpers that
// integrate against a model over its support with a smooth map onto finite
// intervals.

#include <functional>

#include "lskl/distributions.hpp"

namespace lskl {

struct QuadratureOptions {
  double abs_tol = 1e-8;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  int evaluations = 0;
  // An evaluation came back infinite or NaN; value carries it.
  bool nonfinite = false;
};

using Integrand = std::function<double(double)>;

// Finite [a, b]. Throws IntegrationFailure when the subdivision budget runs out.
QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opts = {});

// Integral of g(x) dx over the support of m. Right-unbounded supports use
// x = lo + s t/(1-t); the real line is split at the model's location; the
// transformable families integrate over u = log(x - shift) instead.
QuadratureResult integrate_over_support(const ModelInstance& m, const Integrand& g,
                                        const QuadratureOptions& opts = {});

// E_m[g(X)] by quadrature.
double expectation(const ModelInstance& m, const std::function<double(double)>& g, double abs_tol = 1e-10);

}  // namespace lskl
