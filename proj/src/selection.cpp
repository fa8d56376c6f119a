#include "lskl/selection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "lskl/constants.hpp"
#include "lskl/error.hpp"
#include "lskl/kernels.hpp"

namespace lskl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Summary {
  double mean;
  double sd;
};

Summary summarize(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / n)};
}

std::vector<double> axis(double lo, double hi, std::size_t n, bool log_scale) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log_scale ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  return out;
}

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::sort(v.begin(), v.end());
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double log_marginal_likelihood(const ParameterPrior& prior, const Dataset& data) {
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "marginal likelihood: empty dataset");
  const auto& nodes = prior.nodes();
  std::vector<double> terms(nodes.size());
  if (nodes.size() == 1) {
    terms[0] = kernels::log_likelihood_parallel(data.values, nodes[0]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      terms[i] = kernels::log_likelihood_serial(data.values, nodes[i]);
    }
  }
  double top = kNegInf;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    terms[i] += std::log(prior.weights()[i]);
    top = std::max(top, terms[i]);
  }
  if (top == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

double PosteriorOdds::bayes_factor() const { return std::exp(log_bayes_factor); }
double PosteriorOdds::prior_odds() const { return std::exp(log_prior_odds); }
double PosteriorOdds::posterior_odds() const { return std::exp(log_posterior_odds); }

double PosteriorOdds::posterior_probability_m1() const {
  const double l = log_posterior_odds;
  if (l >= 0.0) return 1.0 / (1.0 + std::exp(-l));
  const double e = std::exp(l);
  return e / (1.0 + e);
}

PosteriorOdds posterior_odds(const Dataset& data, const ParameterPrior& prior1, const ParameterPrior& prior2,
                             const ModelPriorPair& model_priors) {
  const double lm1 = log_marginal_likelihood(prior1, data);
  const double lm2 = log_marginal_likelihood(prior2, data);
  if (lm1 == kNegInf && lm2 == kNegInf) {
    throw Error(ErrorCode::kNoModelExplainsData, "neither candidate model gives the data positive likelihood");
  }
  PosteriorOdds out;
  out.log_bayes_factor = lm1 - lm2;
  out.log_prior_odds = std::log(model_priors.p1) - std::log(model_priors.p2);
  out.log_posterior_odds = out.log_bayes_factor + out.log_prior_odds;
  return out;
}

ParameterPrior data_centred_prior(Family family, const Dataset& data, const DefaultPriorOptions& opts) {
  if (data.size() < 2) throw Error(ErrorCode::kInvalidArgument, "data-centred prior needs at least two data points");
  const FamilySpec& spec = family_spec(family);
  const double w = opts.location_halfwidth;
  const double r = opts.scale_ratio;

  const auto log_data = [&]() {
    std::vector<double> y;
    for (double x : data.values) {
      if (x > 0.0) y.push_back(std::log(x));
    }
    if (y.size() < 2) throw Error(ErrorCode::kInvalidArgument, "data-centred prior: need positive data");
    return y;
  };
  const auto check = [](double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::kInvalidArgument, "data-centred prior: degenerate data");
    return s;
  };

  std::vector<ModelInstance> nodes;
  switch (family) {
    case Family::kHalfNormal:
    case Family::kExponential: {
      const Summary s = summarize(data.values);
      double est = family == Family::kExponential ? s.mean : std::sqrt(s.sd * s.sd + s.mean * s.mean);
      if (!(est > 0.0)) est = std::sqrt(s.sd * s.sd + s.mean * s.mean);
      check(est);
      for (double v : axis(est / r, est * r, opts.nodes_1d, true)) nodes.emplace_back(family, std::array{v});
      break;
    }
    case Family::kLogNormal:
    case Family::kWeibull: {
      const Summary s = summarize(log_data());
      const bool weibull = family == Family::kWeibull;
      const double b = check(weibull ? s.sd / std::sqrt(kPi * kPi / 6.0) : s.sd);
      const double a = weibull ? s.mean + kEulerGamma * b : s.mean;
      for (double loc : axis(a - w * b, a + w * b, opts.nodes_2d, false)) {
        for (double sc : axis(b / r, b * r, opts.nodes_2d, true)) {
          nodes.push_back(weibull ? ModelInstance::weibull(std::exp(loc), 1.0 / sc)
                                  : ModelInstance::log_normal(loc, 1.0 / (sc * sc)));
        }
      }
      break;
    }
    case Family::kUniform: {
      const auto [lo, hi] = std::minmax_element(data.values.begin(), data.values.end());
      const double width = check(*hi - *lo);
      for (double loc : axis(*lo - 0.5 * width, *lo, opts.nodes_2d, false)) {
        for (double sc : axis(width, width * r, opts.nodes_2d, true)) nodes.push_back(ModelInstance::uniform(loc, sc));
      }
      break;
    }
    default: {
      const Summary s = summarize(data.values);
      const double b = check(s.sd / std::sqrt(spec.reduced_variance));
      const double a = s.mean - b * spec.reduced_mean;
      for (double loc : axis(a - w * b, a + w * b, opts.nodes_2d, false)) {
        for (double sc : axis(b / r, b * r, opts.nodes_2d, true)) nodes.emplace_back(family, std::array{loc, sc});
      }
      break;
    }
  }
  return ParameterPrior::uniform_grid(std::move(nodes));
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t n, std::size_t rep) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(rep));
}

BerkReport berk_consistency_sim(const ModelInstance& truth, const Candidate& m1, const Candidate& m2,
                                const BerkOptions& opts) {
  if (opts.n_grid.empty()) throw Error(ErrorCode::kInvalidArgument, "berk simulation: empty n grid");
  if (opts.reps == 0) throw Error(ErrorCode::kInvalidArgument, "berk simulation: reps must be >= 1");
  for (std::size_t n : opts.n_grid) {
    if (n == 0) throw Error(ErrorCode::kInvalidArgument, "berk simulation: sample sizes must be >= 1");
    if (n < 2 && (!m1.prior || !m2.prior)) {
      throw Error(ErrorCode::kInvalidArgument, "berk simulation: data-centred priors need n >= 2");
    }
  }

  BerkReport rep{truth, m1.family, m2.family, 1, 0.0, 0.0, {}, {}, false, {}};
  rep.n_grid = opts.n_grid;
  rep.min_kl_m1 = min_kl(truth, m1.family, opts.minkl).value.value;
  rep.min_kl_m2 = min_kl(truth, m2.family, opts.minkl).value.value;
  rep.nearest = rep.min_kl_m2 < rep.min_kl_m1 ? 2 : 1;

  const std::size_t cells = opts.n_grid.size() * opts.reps;
  rep.rows.resize(cells);
  std::vector<std::exception_ptr> errors(cells);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t c = 0; c < cells; ++c) {
    try {
      const std::size_t ni = c / opts.reps;
      const std::size_t r = c % opts.reps;
      const std::size_t n = opts.n_grid[ni];
      const Dataset data = sample(truth, n, replication_seed(opts.seed, n, r));
      const ParameterPrior p1 = m1.prior ? *m1.prior : data_centred_prior(m1.family, data, opts.default_prior);
      const ParameterPrior p2 = m2.prior ? *m2.prior : data_centred_prior(m2.family, data, opts.default_prior);
      const PosteriorOdds odds = posterior_odds(data, p1, p2, opts.model_priors);
      const double prob1 = odds.posterior_probability_m1();
      const double prob_nearest =
          rep.nearest == 1 ? prob1 : PosteriorOdds{0, 0, -odds.log_posterior_odds}.posterior_probability_m1();
      rep.rows[c] = {n, r, prob_nearest, odds.log_posterior_odds};
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t ni = 0; ni < opts.n_grid.size(); ++ni) {
    std::vector<double> probs;
    for (std::size_t r = 0; r < opts.reps; ++r) probs.push_back(rep.rows[ni * opts.reps + r].posterior_prob);
    rep.median_posterior.push_back(median(std::move(probs)));
  }
  rep.median_nondecreasing = true;
  for (std::size_t i = 1; i < rep.median_posterior.size(); ++i) {
    if (rep.median_posterior[i] < rep.median_posterior[i - 1]) rep.median_nondecreasing = false;
  }
  return rep;
}

}  // namespace lskl
