#pragma once

// Canonical text forms used on the command line:
//
//   model:  halfnormal(sigma=2)   weibull(lambda=1,kappa=2,shift=0.5)
//   grid:   sigma=[0.1,1,5,20]    mu=[-2,0,3]; tau=[0.25,1,9]
//
// Grids over several parameters are Cartesian products, first key slowest.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lskl/distributions.hpp"

namespace lskl {

// 12 significant digits, shortest form.
std::string format_number(double v);

std::string to_text(const ModelInstance& m);

// Throws Error(kParse) on unknown families, unknown or missing parameters and
// malformed numbers; Error(kInvalidArgument) on out-of-range values.
ModelInstance parse_model(std::string_view text);
Family parse_family(std::string_view text);

// `key=value` or `key=[v1,v2,...]` entries separated by ';'.
using KeyValueList = std::vector<std::pair<std::string, std::vector<double>>>;
KeyValueList parse_key_values(std::string_view text);

std::vector<ModelInstance> parse_param_grid(Family family, std::string_view text);

}  // namespace lskl
