#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lskl {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  double ftol = 1e-10;  // stop when max f - min f over the simplex falls below this
  double xtol = 1e-9;   // ... and the simplex diameter falls below this
  int max_evaluations = 4000;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  double final_spread = 0.0;  // f spread over the final simplex
  double final_size = 0.0;    // simplex diameter
  bool converged = false;
};

// Standard reflection/expansion/contraction/shrink simplex search.
// Infinite objective values are allowed and treated as worst.
NelderMeadResult nelder_mead(const Objective& f, std::span<const double> start, const NelderMeadOptions& opts = {});

// Root of g on [lo, hi] by Brent's method; g(lo) and g(hi) must differ in sign.
double brent_root(const std::function<double(double)>& g, double lo, double hi, double xtol = 1e-12,
                  int max_iter = 200);

}  // namespace lskl
