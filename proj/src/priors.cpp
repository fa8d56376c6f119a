#include "lskl/priors.hpp"

#include <cmath>
#include <exception>
#include <numeric>

#include "lskl/constants.hpp"
#include "lskl/error.hpp"
#include "lskl/text_form.hpp"

namespace lskl {

namespace {

constexpr double kMassTolerance = 1e-8;

std::string list_text(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_number(v[i]);
  }
  return s + "]";
}

std::vector<double> spaced(double lo, double hi, std::size_t n, bool log_scale) {
  if (n == 0) throw Error(ErrorCode::kParse, "prior: n must be >= 1");
  if (log_scale && !(lo > 0.0 && hi > 0.0)) throw Error(ErrorCode::kInvalidArgument, "loguniform bounds must be > 0");
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = log_scale ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  return out;
}

std::vector<ModelInstance> cartesian(Family family, const std::vector<std::vector<double>>& axes, double shift) {
  const FamilySpec& spec = family_spec(family);
  std::vector<ModelInstance> nodes;
  if (spec.n_params == 1) {
    for (double v : axes[0]) nodes.emplace_back(family, std::array{v}, shift);
  } else {
    for (double v0 : axes[0])
      for (double v1 : axes[1]) nodes.emplace_back(family, std::array{v0, v1}, shift);
  }
  return nodes;
}

}  // namespace

std::string_view to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::kPointMass: return "point_mass";
    case PriorKind::kGridWeighted: return "grid_weighted";
    case PriorKind::kSampler: return "sampler";
  }
  return "unknown";
}

ParameterPrior::ParameterPrior(PriorKind kind, std::vector<ModelInstance> nodes, std::vector<double> weights,
                               std::string desc)
    : kind_(kind), nodes_(std::move(nodes)), weights_(std::move(weights)), description_(std::move(desc)) {
  if (nodes_.empty()) throw Error(ErrorCode::kInvalidArgument, "prior needs at least one node");
  if (nodes_.size() != weights_.size()) throw Error(ErrorCode::kInvalidArgument, "prior: nodes/weights size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].family() != nodes_.front().family()) {
      throw Error(ErrorCode::kInvalidArgument, "prior nodes must share one family");
    }
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "prior weights must be positive and finite");
    }
    total += weights_[i];
  }
  if (std::fabs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorCode::kInvalidArgument, "prior is not proper: weights sum to " + format_number(total));
  }
}

ParameterPrior ParameterPrior::point_mass(ModelInstance node) {
  std::string desc = "point(";
  const FamilySpec& spec = node.spec();
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (i) desc += "; ";
    desc += std::string(spec.param_names[i]) + "=" + format_number(node.param(i));
  }
  if (node.shift() != 0.0) desc += "; shift=" + format_number(node.shift());
  desc += ")";
  return ParameterPrior(PriorKind::kPointMass, {std::move(node)}, {1.0}, std::move(desc));
}

ParameterPrior ParameterPrior::grid(std::vector<ModelInstance> nodes, std::vector<double> weights) {
  std::string desc = "grid(nodes=" + std::to_string(nodes.size()) + ")";
  return ParameterPrior(PriorKind::kGridWeighted, std::move(nodes), std::move(weights), std::move(desc));
}

ParameterPrior ParameterPrior::uniform_grid(std::vector<ModelInstance> nodes) {
  const double w = nodes.empty() ? 0.0 : 1.0 / static_cast<double>(nodes.size());
  std::vector<double> weights(nodes.size(), w);
  return grid(std::move(nodes), std::move(weights));
}

ParameterPrior ParameterPrior::sampled(Family family, const std::vector<std::pair<double, double>>& ranges,
                                       std::size_t n, std::uint64_t seed, double shift) {
  const FamilySpec& spec = family_spec(family);
  if (ranges.size() != spec.n_params) throw Error(ErrorCode::kInvalidArgument, "sampled prior: one range per parameter");
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sampled prior: n must be >= 1");
  DrawStream stream(seed);
  std::vector<ModelInstance> nodes;
  std::vector<double> params(spec.n_params);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < spec.n_params; ++i) {
      const auto [lo, hi] = ranges[i];
      const double u = stream.open_unit();
      params[i] = spec.positive[i] ? std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))) : lo + u * (hi - lo);
    }
    nodes.emplace_back(family, params, shift);
  }
  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::string desc = "draws(";
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    desc += std::string(spec.param_names[i]) + "=" + list_text({ranges[i].first, ranges[i].second}) + "; ";
  }
  desc += "n=" + std::to_string(n) + "; seed=" + std::to_string(seed) + ")";
  return ParameterPrior(PriorKind::kSampler, std::move(nodes), std::move(weights), std::move(desc));
}

ParameterPrior parse_prior(Family family, std::string_view text) {
  const FamilySpec& spec = family_spec(family);
  std::string_view t = text;
  while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
  while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
  const auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    throw Error(ErrorCode::kParse, "prior must look like kind(key=...; ...): '" + std::string(t) + "'");
  }
  const std::string kind(t.substr(0, open));
  const KeyValueList kv = parse_key_values(t.substr(open + 1, t.size() - open - 2));

  std::vector<std::vector<double>> axes(spec.n_params);
  std::vector<double> weights;
  double shift = 0.0;
  std::optional<double> n_opt;
  std::optional<double> seed_opt;
  for (const auto& [key, vals] : kv) {
    if (key == "w") {
      weights = vals;
      continue;
    }
    if (key == "n" || key == "seed") {
      if (vals.size() != 1) throw Error(ErrorCode::kParse, "prior: '" + key + "' takes one value");
      (key == "n" ? n_opt : seed_opt) = vals[0];
      continue;
    }
    if (key == "shift" && spec.has_shift) {
      if (vals.size() != 1) throw Error(ErrorCode::kParse, "prior: shift takes one value");
      shift = vals[0];
      continue;
    }
    bool found = false;
    for (std::size_t i = 0; i < spec.n_params; ++i) {
      if (spec.param_names[i] == key) {
        axes[i] = vals;
        found = true;
      }
    }
    if (!found) throw Error(ErrorCode::kParse, "prior: unknown key '" + key + "' for " + std::string(spec.name));
  }
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (axes[i].empty()) {
      throw Error(ErrorCode::kParse, "prior: missing parameter '" + std::string(spec.param_names[i]) + "'");
    }
  }
  const auto count = [&]() -> std::size_t {
    if (!n_opt || *n_opt < 1 || *n_opt != std::floor(*n_opt)) throw Error(ErrorCode::kParse, "prior: needs integer n >= 1");
    return static_cast<std::size_t>(*n_opt);
  };
  const auto bounds = [&](std::size_t i) {
    if (axes[i].size() != 2 || !(axes[i][0] < axes[i][1])) {
      throw Error(ErrorCode::kParse, "prior: '" + std::string(spec.param_names[i]) + "' needs [lo,hi] with lo < hi");
    }
    return std::pair{axes[i][0], axes[i][1]};
  };

  if (kind == "point") {
    std::vector<double> params;
    for (const auto& a : axes) {
      if (a.size() != 1) throw Error(ErrorCode::kParse, "point prior takes one value per parameter");
      params.push_back(a[0]);
    }
    return ParameterPrior::point_mass(ModelInstance(family, params, shift));
  }
  if (kind == "grid") {
    std::vector<ModelInstance> nodes = cartesian(family, axes, shift);
    if (weights.empty()) weights.assign(nodes.size(), 1.0 / static_cast<double>(nodes.size()));
    if (weights.size() != nodes.size()) {
      throw Error(ErrorCode::kParse, "grid prior: " + std::to_string(nodes.size()) + " nodes but " +
                                         std::to_string(weights.size()) + " weights");
    }
    std::string desc = "grid(";
    for (std::size_t i = 0; i < spec.n_params; ++i) desc += std::string(spec.param_names[i]) + "=" + list_text(axes[i]) + "; ";
    desc += "w=" + list_text(weights) + ")";
    return ParameterPrior(PriorKind::kGridWeighted, std::move(nodes), std::move(weights), std::move(desc));
  }
  if (kind == "uniform" || kind == "loguniform") {
    const std::size_t n = count();
    std::vector<std::vector<double>> pts(spec.n_params);
    std::string desc = kind + "(";
    for (std::size_t i = 0; i < spec.n_params; ++i) {
      const auto [lo, hi] = bounds(i);
      pts[i] = spaced(lo, hi, n, kind == "loguniform" && spec.positive[i]);
      desc += std::string(spec.param_names[i]) + "=" + list_text({lo, hi}) + "; ";
    }
    desc += "n=" + std::to_string(n) + ")";
    std::vector<ModelInstance> nodes = cartesian(family, pts, shift);
    std::vector<double> w(nodes.size(), 1.0 / static_cast<double>(nodes.size()));
    return ParameterPrior(PriorKind::kGridWeighted, std::move(nodes), std::move(w), std::move(desc));
  }
  if (kind == "draws") {
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t i = 0; i < spec.n_params; ++i) ranges.push_back(bounds(i));
    const double seed = seed_opt.value_or(1.0);
    if (seed < 0 || seed != std::floor(seed)) throw Error(ErrorCode::kParse, "draws prior: seed must be a non-negative integer");
    return ParameterPrior::sampled(family, ranges, count(), static_cast<std::uint64_t>(seed), shift);
  }
  throw Error(ErrorCode::kParse, "unknown prior kind '" + kind + "'");
}

ParameterPrior default_point_prior(Family family) {
  switch (family) {
    case Family::kHalfNormal:
    case Family::kExponential:
      return ParameterPrior::point_mass(ModelInstance(family, std::array{1.0}));
    case Family::kWeibull:
      return ParameterPrior::point_mass(ModelInstance::weibull(1.0, 1.0));
    case Family::kLogNormal:
      return ParameterPrior::point_mass(ModelInstance::log_normal(0.0, 1.0));
    default:
      return ParameterPrior::point_mass(ModelInstance(family, std::array{0.0, 1.0}));
  }
}

ModelPriorPair model_prior_pair_from_losses(double loss1, double loss2) {
  ModelPriorPair out;
  out.loss1 = loss1;
  out.loss2 = loss2;
  out.mass1 = std::exp(loss1);
  out.mass2 = std::exp(loss2);
  // The smaller probability is computed directly, the larger as its
  // complement, so swapping the models swaps the pair bit for bit.
  const double total = out.mass1 + out.mass2;
  if (out.mass1 <= out.mass2) {
    out.p1 = out.mass1 / total;
    out.p2 = 1.0 - out.p1;
  } else {
    out.p2 = out.mass2 / total;
    out.p1 = 1.0 - out.p2;
  }
  return out;
}

ModelPriorPair uniform_model_priors() { return model_prior_pair_from_losses(0.0, 0.0); }

double expected_min_kl(const ParameterPrior& prior, Family target, const MinKLOptions& opts) {
  const auto& nodes = prior.nodes();
  std::vector<double> values(nodes.size());
  std::vector<std::exception_ptr> errors(nodes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    try {
      values[i] = min_kl(nodes[i], target, opts).value.value;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) total += prior.weights()[i] * values[i];
  return total;
}

ModelPriorPair model_prior_pair(const ParameterPrior& prior1, const ParameterPrior& prior2, const MinKLOptions& opts) {
  const double loss1 = expected_min_kl(prior1, prior2.family(), opts);
  const double loss2 = expected_min_kl(prior2, prior1.family(), opts);
  return model_prior_pair_from_losses(loss1, loss2);
}

std::optional<std::pair<double, double>> reported_losses(Family family1, Family family2) {
  const double hn_to_exp = kLogTwoOverPi + 0.5;
  const double exp_to_hn = -0.5 * kLogTwoOverPi;
  const double ln_to_wei = 1.0 - 0.5 * kLogTwoPi;
  const double wei_to_ln = 0.5 * kLogTwoPi + std::log(kPi) - kEulerGamma - 0.5 * std::log(6.0) - 0.5;
  if (family1 == Family::kHalfNormal && family2 == Family::kExponential) return std::pair{hn_to_exp, exp_to_hn};
  if (family1 == Family::kExponential && family2 == Family::kHalfNormal) return std::pair{exp_to_hn, hn_to_exp};
  if (family1 == Family::kLogNormal && family2 == Family::kWeibull) return std::pair{ln_to_wei, wei_to_ln};
  if (family1 == Family::kWeibull && family2 == Family::kLogNormal) return std::pair{wei_to_ln, ln_to_wei};
  return std::nullopt;
}

}  // namespace lskl
